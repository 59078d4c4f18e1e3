#pragma once

// Umbrella header for the dependency-free core (no TIFF, no CLI).

#include "celltrack/activity.hpp"
#include "celltrack/assignment.hpp"
#include "celltrack/evaluation.hpp"
#include "celltrack/image.hpp"
#include "celltrack/instances.hpp"
#include "celltrack/lap.hpp"
#include "celltrack/lineage.hpp"
#include "celltrack/linking.hpp"
#include "celltrack/pipeline.hpp"
#include "celltrack/synthgen.hpp"
#include "celltrack/track_file.hpp"
