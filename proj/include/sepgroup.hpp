#ifndef SEPGROUP_HPP
#define SEPGROUP_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/ordinal.hpp>
#include <sepgroup/ladder.hpp>
#include <sepgroup/free_element.hpp>
#include <sepgroup/lattice.hpp>
#include <sepgroup/group_core.hpp>
#include <sepgroup/stage_group.hpp>
#include <sepgroup/filtration_equiv.hpp>
#include <sepgroup/whitehead.hpp>

#endif  // SEPGROUP_HPP
