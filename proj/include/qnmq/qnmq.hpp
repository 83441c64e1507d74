#pragma once

#include "badcavity.hpp"
#include "cmt.hpp"
#include "core.hpp"
#include "evolve.hpp"
#include "fields.hpp"
#include "fock.hpp"
#include "lindblad.hpp"
#include "linalg.hpp"
#include "models.hpp"
#include "symm.hpp"

namespace qnmq {
inline constexpr const char* version = "0.1.0";
}
