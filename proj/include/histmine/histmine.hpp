#pragma once

// Umbrella header: version-history mining, key-version detection, log
// classification and phase segmentation.

#include "histmine/config.hpp"
#include "histmine/core.hpp"
#include "histmine/detect.hpp"
#include "histmine/error.hpp"
#include "histmine/jsonl.hpp"
#include "histmine/metrics.hpp"
#include "histmine/notes.hpp"
#include "histmine/phasing.hpp"
#include "histmine/pipeline.hpp"
#include "histmine/synth.hpp"
#include "histmine/textmine.hpp"
#include "histmine/vcs.hpp"
