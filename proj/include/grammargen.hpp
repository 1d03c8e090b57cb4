#pragma once

#include "grammargen/certificate.hpp"
#include "grammargen/coarsen.hpp"
#include "grammargen/corpus_io.hpp"
#include "grammargen/error.hpp"
#include "grammargen/estimator.hpp"
#include "grammargen/evalkit.hpp"
#include "grammargen/fold.hpp"
#include "grammargen/grammar.hpp"
#include "grammargen/grammar_io.hpp"
#include "grammargen/graph.hpp"
#include "grammargen/graph_json.hpp"
#include "grammargen/hash.hpp"
#include "grammargen/isomorphism.hpp"
#include "grammargen/kernel.hpp"
#include "grammargen/rna.hpp"
#include "grammargen/rng.hpp"
#include "grammargen/sample_io.hpp"
#include "grammargen/sampler.hpp"
