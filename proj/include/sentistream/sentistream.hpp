#pragma once

// Umbrella header for the whole library.

#include "sentistream/cluster.hpp"
#include "sentistream/corpus.hpp"
#include "sentistream/csv.hpp"
#include "sentistream/error.hpp"
#include "sentistream/featurize.hpp"
#include "sentistream/forecast.hpp"
#include "sentistream/io.hpp"
#include "sentistream/rng.hpp"
#include "sentistream/sentiment.hpp"
#include "sentistream/stream.hpp"
#include "sentistream/svg.hpp"
#include "sentistream/synth.hpp"
