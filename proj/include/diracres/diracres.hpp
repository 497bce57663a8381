#pragma once

#include "types.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "dirac.hpp"
#include "surface.hpp"
#include "kernel.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "resolvent.hpp"
#include "birman_schwinger.hpp"
#include "search.hpp"
#include "sphere.hpp"
#include "rellich.hpp"
#include "mit.hpp"
#include "config.hpp"
#include "selftest.hpp"
