#ifndef REVSPLIT_TESTS_ORACLES_HPP
#define REVSPLIT_TESTS_ORACLES_HPP

#include <string>
#include <string_view>
#include <vector>

namespace revsplit::testsupport {

/// Textbook recursive edit-distance definition (memoized), kept independent
/// of the row-DP implementation it checks.
int levenshtein_oracle(std::string_view a, std::string_view b);

/// Independent BLEU-4 reference: per-position clipped matching over
/// map-keyed n-grams, direct product and pow instead of log space.
double bleu_oracle(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

std::vector<std::string> whitespace_tokens(std::string_view s);

} // namespace revsplit::testsupport

#endif
