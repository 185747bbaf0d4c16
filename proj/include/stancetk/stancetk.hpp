#ifndef STANCETK_STANCETK_HPP
#define STANCETK_STANCETK_HPP

#include "stancetk/baseline.hpp"
#include "stancetk/corpus.hpp"
#include "stancetk/discovery.hpp"
#include "stancetk/errors.hpp"
#include "stancetk/eval.hpp"
#include "stancetk/features.hpp"
#include "stancetk/lda.hpp"
#include "stancetk/manifest.hpp"
#include "stancetk/rng.hpp"
#include "stancetk/svm.hpp"
#include "stancetk/synth.hpp"
#include "stancetk/text.hpp"
#include "stancetk/tree.hpp"
#include "stancetk/version.hpp"

#endif // STANCETK_STANCETK_HPP
