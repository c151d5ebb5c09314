#ifndef WSP_WSP_HPP
#define WSP_WSP_HPP

#include "wsp/bench.hpp"
#include "wsp/canonical.hpp"
#include "wsp/constraints.hpp"
#include "wsp/cover_dp.hpp"
#include "wsp/error.hpp"
#include "wsp/generators.hpp"
#include "wsp/hierarchy.hpp"
#include "wsp/io.hpp"
#include "wsp/kernel.hpp"
#include "wsp/model.hpp"
#include "wsp/oracle.hpp"
#include "wsp/search.hpp"
#include "wsp/solver.hpp"
#include "wsp/step_set.hpp"

#endif
