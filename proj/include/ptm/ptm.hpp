#ifndef PTM_PTM_HPP
#define PTM_PTM_HPP

#include "ptm/cells.hpp"
#include "ptm/common.hpp"
#include "ptm/control_io.hpp"
#include "ptm/field.hpp"
#include "ptm/geometry.hpp"
#include "ptm/metrics.hpp"
#include "ptm/pattern.hpp"
#include "ptm/synthesis.hpp"
#include "ptm/tracking.hpp"

#endif
