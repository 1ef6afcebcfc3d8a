#pragma once

#include <cstdint>

#include "ccattack/corpus.hpp"

namespace ccattack::synth {

// Deterministic topic-pool corpus: method snippets whose identifiers, string
// and numeric literals and reference comments share topic words, so both the
// retrieval surrogate and the toy model are sensitive to identifier
// substitution while non-identifier tokens still carry topic signal.
corpus::Dataset make_dataset(lang::Lang lang, std::size_t count, std::uint64_t seed);

// Corpus for masked-training comparisons: every sample declares exactly two
// identifiers (method and one parameter), so a two-substitution attack can
// remove all identifier evidence, while a helper call name repeats every
// reference-comment word. Call names are not declarations, so that evidence
// survives any rename.
corpus::Dataset make_anchored_dataset(lang::Lang lang, std::size_t count,
                                      std::uint64_t seed);

// Corpus of sample pairs with identical code except one frequently used local
// (the hub) and unrelated comments. Renaming anything in the later pair member
// ties its token multiset with the earlier one's, and renaming the earlier
// member's hub to its partner's hub name matches the partner exactly, so a
// retrieval model over the corpus flips between pair members under identifier
// substitution in a way exhaustive per-candidate search always finds.
corpus::Dataset make_flip_pairs(lang::Lang lang, std::size_t pairs,
                                std::uint64_t seed);

}  // namespace ccattack::synth
