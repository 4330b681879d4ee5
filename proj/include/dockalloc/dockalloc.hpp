#ifndef DOCKALLOC_DOCKALLOC_HPP_
#define DOCKALLOC_DOCKALLOC_HPP_

#include "allocator.hpp"
#include "cost_oracle.hpp"
#include "demand.hpp"
#include "error.hpp"
#include "longrun.hpp"
#include "oracle.hpp"
#include "posterior.hpp"
#include "profile.hpp"
#include "scaling.hpp"
#include "sequence.hpp"
#include "udf.hpp"
#include "verify.hpp"

#endif  // DOCKALLOC_DOCKALLOC_HPP_
