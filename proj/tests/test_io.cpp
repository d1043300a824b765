#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fracsol/io.hpp"

using namespace fracsol;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path d = fs::temp_directory_path() / ("fracsol_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(d);
  return d;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TEST(Profile, RoundTripIsBitExact) {
  const fs::path dir = temp_dir();
  SolitaryWave w = petviashvili(ModelSpec::fkdv(0.75), 1.0, make_grid(1024, 50.0));
  io::save_profile(w.profile, io::wave_metadata(w), dir / "q.csv");
  ASSERT_TRUE(fs::exists(dir / "q.json"));
  io::LoadedProfile l = io::load_profile(dir / "q.csv");
  ASSERT_TRUE(l.field.grid() == w.profile.grid());
  for (std::size_t k = 0; k < w.profile.size(); ++k) ASSERT_EQ(l.field[k], w.profile[k]);
  EXPECT_EQ(l.meta["family"], "fkdv");
  EXPECT_DOUBLE_EQ(l.meta["c"].get<double>(), 1.0);
}

TEST(Profile, MissingRowNamesLine) {
  const fs::path dir = temp_dir();
  RealField u = RealField::from_function(make_grid(16, 2.0), [](double x) { return x; });
  io::save_profile(u, nullptr, dir / "m.csv");
  auto lines = read_lines(dir / "m.csv");
  lines.erase(lines.begin() + 6);
  write_lines(dir / "m.csv", lines);
  try {
    io::load_profile(dir / "m.csv");
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
  }
}

TEST(Profile, MalformedAndNaN) {
  const fs::path dir = temp_dir();
  RealField u = RealField::from_function(make_grid(8, 2.0), [](double x) { return x * x; });
  io::save_profile(u, nullptr, dir / "b.csv");
  auto lines = read_lines(dir / "b.csv");
  auto bad = lines;
  bad[3] = "-1,abc";
  write_lines(dir / "b.csv", bad);
  EXPECT_THROW(io::load_profile(dir / "b.csv"), FormatError);
  bad = lines;
  bad[3] = "-1,nan";
  write_lines(dir / "b.csv", bad);
  EXPECT_THROW(io::load_profile(dir / "b.csv"), FormatError);
  bad = lines;
  bad[0] = "x,y";
  write_lines(dir / "b.csv", bad);
  EXPECT_THROW(io::load_profile(dir / "b.csv"), FormatError);
}

TEST(Profile, SidecarGridMismatch) {
  const fs::path dir = temp_dir();
  RealField u = RealField::from_function(make_grid(16, 2.0), [](double x) { return x; });
  io::save_profile(u, nlohmann::json{{"c", 1.0}}, dir / "s.csv");
  nlohmann::json m = nlohmann::json::parse(std::ifstream(dir / "s.json"));
  m["n"] = 32;
  std::ofstream(dir / "s.json") << m.dump();
  try {
    io::load_profile(dir / "s.csv");
    FAIL() << "expected grid mismatch";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("grid mismatch"), std::string::npos);
  }
}

TEST(Trace, Headers) {
  const fs::path dir = temp_dir();
  EvolutionTrace tr = evolve(ModelSpec::fkdv(0.8), RealField::zeros(make_grid(64, 10.0)), 0.1, 0.05, {});
  io::save_trace(tr, dir / "t.csv");
  EXPECT_EQ(read_lines(dir / "t.csv")[0], "t,mass,energy,orbital_distance");
  tr.family = Family::FBBM;
  io::save_trace(tr, dir / "t.csv");
  EXPECT_EQ(read_lines(dir / "t.csv")[0], "t,quadratic,hamiltonian,orbital_distance");
}

TEST(Field2D, CsvAndSidecar) {
  const fs::path dir = temp_dir();
  Grid2D g(8, 8, 1.0, 2.0);
  io::save_field_2d(RealField2D::from_function(g, [](double x, double y) { return x + y; }), dir / "f.csv");
  auto lines = read_lines(dir / "f.csv");
  EXPECT_EQ(lines[0], "x,y,value");
  EXPECT_EQ(lines.size(), 65u);
  nlohmann::json m = nlohmann::json::parse(std::ifstream(dir / "f.json"));
  EXPECT_EQ(m["ny"], 8);
  EXPECT_DOUBLE_EQ(m["Ly"].get<double>(), 2.0);
}
