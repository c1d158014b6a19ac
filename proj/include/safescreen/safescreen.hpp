#ifndef SAFESCREEN_SAFESCREEN_HPP
#define SAFESCREEN_SAFESCREEN_HPP

#include "safescreen/core.hpp"
#include "safescreen/ellipsoid.hpp"
#include "safescreen/erm.hpp"
#include "safescreen/kernels.hpp"
#include "safescreen/losses.hpp"
#include "safescreen/screening.hpp"

#endif  // SAFESCREEN_SAFESCREEN_HPP
