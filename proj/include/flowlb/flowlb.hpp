#pragma once

// Umbrella header.

#include "bits.hpp"
#include "error.hpp"
#include "explicit_states.hpp"
#include "flow_explicit.hpp"
#include "flow_term.hpp"
#include "green.hpp"
#include "group_mapping.hpp"
#include "laws.hpp"
#include "loopable.hpp"
#include "monoid.hpp"
#include "presentation.hpp"
#include "r_action.hpp"
#include "rees.hpp"
#include "set_partition.hpp"
#include "states.hpp"
#include "symbolic.hpp"
