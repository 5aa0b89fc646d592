#pragma once

// Everything except the command-line front end.

#include "cluster.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "html.hpp"
#include "learn/model.hpp"
#include "porter.hpp"
#include "report.hpp"
#include "semsim.hpp"
#include "synth.hpp"
#include "text.hpp"
#include "version.hpp"
#include "wordnet.hpp"
