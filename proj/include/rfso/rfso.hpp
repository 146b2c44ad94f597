#ifndef RFSO_RFSO_HPP
#define RFSO_RFSO_HPP

#include "rfso/errors.hpp"
#include "rfso/quadrature.hpp"
#include "rfso/specfun.hpp"
#include "rfso/random.hpp"
#include "rfso/rf_hop.hpp"
#include "rfso/fso_hop.hpp"
#include "rfso/link.hpp"
#include "rfso/analysis.hpp"
#include "rfso/montecarlo.hpp"

#endif // RFSO_RFSO_HPP
