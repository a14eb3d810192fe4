#ifndef WIENER_WIENER_HPP
#define WIENER_WIENER_HPP

#include "wiener/error.hpp"
#include "wiener/geometry.hpp"
#include "wiener/radial.hpp"
#include "wiener/spherical.hpp"
#include "wiener/kernels.hpp"
#include "wiener/sets.hpp"
#include "wiener/capacity.hpp"
#include "wiener/criteria.hpp"
#include "wiener/config.hpp"
#include "wiener/pipeline.hpp"

#endif  // WIENER_WIENER_HPP
