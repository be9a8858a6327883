#pragma once

#include "qamem/core.hpp"
#include "qamem/gate_matrix.hpp"
#include "qamem/gates.hpp"
#include "qamem/memory.hpp"
#include "qamem/noise.hpp"
#include "qamem/oracle.hpp"
#include "qamem/qstate.hpp"
#include "qamem/retrieval.hpp"
#include "qamem/scenario.hpp"
#include "qamem/validate.hpp"
