#pragma once

#include "squeeze_forge/errors.hpp"
#include "squeeze_forge/jet.hpp"
#include "squeeze_forge/graphs.hpp"
#include "squeeze_forge/curvature.hpp"
#include "squeeze_forge/parallel.hpp"
#include "squeeze_forge/domain.hpp"
#include "squeeze_forge/squeeze.hpp"
#include "squeeze_forge/schedule.hpp"
#include "squeeze_forge/certificate.hpp"
#include "squeeze_forge/io.hpp"
#include "squeeze_forge/cli.hpp"
