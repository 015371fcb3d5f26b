#pragma once

#include "linalg.hpp"
#include "groups.hpp"
#include "spectral.hpp"
#include "nilpotent.hpp"
#include "rho.hpp"
#include "rotation.hpp"
#include "surface.hpp"
#include "io.hpp"
#include "verify.hpp"
