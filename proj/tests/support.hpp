#ifndef DOCKALLOC_TESTS_SUPPORT_HPP_
#define DOCKALLOC_TESTS_SUPPORT_HPP_

#include <random>

#include <dockalloc/dockalloc.hpp>

namespace dockalloc::testing {

using verify::random_finite_profile;
using verify::random_instance;
using verify::random_poisson_profile;
using verify::random_sequence;
using verify::RandomInstance;

}  // namespace dockalloc::testing

#endif  // DOCKALLOC_TESTS_SUPPORT_HPP_
