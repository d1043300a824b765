#pragma once

#include "fracsol/error.hpp"
#include "fracsol/fft.hpp"
#include "fracsol/grid.hpp"
#include "fracsol/field.hpp"
#include "fracsol/symbol.hpp"
#include "fracsol/spectral.hpp"
#include "fracsol/functionals.hpp"
#include "fracsol/ground_state.hpp"
#include "fracsol/verification.hpp"
#include "fracsol/evolution.hpp"
#include "fracsol/kp2d.hpp"
#include "fracsol/io.hpp"
