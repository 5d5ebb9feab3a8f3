#pragma once

// Convenience umbrella for the whole library.

#include "aspectrank/errors.hpp"
#include "aspectrank/corpus.hpp"
#include "aspectrank/pos.hpp"
#include "aspectrank/lexicon.hpp"
#include "aspectrank/crf.hpp"
#include "aspectrank/associate.hpp"
#include "aspectrank/fuzzy.hpp"
#include "aspectrank/bm25.hpp"
#include "aspectrank/rank.hpp"
#include "aspectrank/pipeline.hpp"
#include "aspectrank/synth.hpp"
#include "aspectrank/config.hpp"
#include "aspectrank/commands.hpp"
