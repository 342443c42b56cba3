#ifndef LGLAB_LGLAB_HPP
#define LGLAB_LGLAB_HPP

#include "lglab/types.hpp"
#include "lglab/errors.hpp"
#include "lglab/rng.hpp"
#include "lglab/parallel.hpp"
#include "lglab/quadrature.hpp"
#include "lglab/potential.hpp"
#include "lglab/conformal.hpp"
#include "lglab/moments.hpp"
#include "lglab/schwarz.hpp"
#include "lglab/growth.hpp"
#include "lglab/gas.hpp"
#include "lglab/stats.hpp"
#include "lglab/verify.hpp"
#include "lglab/io.hpp"
#include "lglab/svg.hpp"
#include "lglab/config.hpp"
#include "lglab/runner.hpp"

#endif
