#pragma once

// Umbrella header for the VULCA commentary-analytics library.

#include "vulca/corpus.hpp"
#include "vulca/default_assets.hpp"
#include "vulca/errors.hpp"
#include "vulca/features.hpp"
#include "vulca/iaa.hpp"
#include "vulca/inference.hpp"
#include "vulca/pipeline.hpp"
#include "vulca/profiles.hpp"
#include "vulca/projection.hpp"
#include "vulca/report.hpp"
#include "vulca/rubric.hpp"
#include "vulca/stats.hpp"
#include "vulca/structured.hpp"
#include "vulca/taxonomy.hpp"
#include "vulca/version.hpp"
