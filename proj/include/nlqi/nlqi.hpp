#pragma once

#include "nlqi/atomic_model.hpp"
#include "nlqi/diag_oracle.hpp"
#include "nlqi/errors.hpp"
#include "nlqi/io.hpp"
#include "nlqi/klein.hpp"
#include "nlqi/metrology.hpp"
#include "nlqi/numeric.hpp"
#include "nlqi/rng.hpp"
#include "nlqi/spin_stokes.hpp"
#include "nlqi/tensor.hpp"
#include "nlqi/twisting.hpp"
#include "nlqi/wigner.hpp"
