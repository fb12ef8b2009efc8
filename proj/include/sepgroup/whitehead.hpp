#ifndef SEPGROUP_WHITEHEAD_HPP
#define SEPGROUP_WHITEHEAD_HPP

#include <sepgroup/twisted.hpp>
#include <sepgroup/uniformization.hpp>

#endif  // SEPGROUP_WHITEHEAD_HPP
