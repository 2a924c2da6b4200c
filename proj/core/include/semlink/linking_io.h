#ifndef SEMLINK_LINKING_IO_H_
#define SEMLINK_LINKING_IO_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "semlink/linking.h"
#include "semlink/metrics.h"

namespace semlink {

inline constexpr std::size_t kDefaultContextWindow = 25;

// Lowercased tokens within `window` tokens on each side of [start, end),
// excluding the mention itself.
std::vector<std::string> context_window(const std::vector<std::string> &tokens,
                                        std::size_t start, std::size_t end,
                                        std::size_t window);

// One JSON object per line:
//   {"doc_id": "...", "tokens": [...],
//    "mentions": [{"start": 3, "end": 5, "candidates": ["A", "B"],
//                  "priors": [0.7, 0.3], "gold": "A"}]}
// A mention may carry an explicit "context" token list instead of offsets.
std::vector<LinkingDocument> parse_linking_jsonl(
    std::string_view text, std::size_t window = kDefaultContextWindow);
std::string serialize_linking_jsonl(const std::vector<LinkingDocument> &docs);

// Simplified CoNLL/AIDA layout:
//   -DOCSTART- <doc_id>
//   <token>[\tB\t<gold or --NME-->\t<cand>[:prior]|<cand>...]
//   <token>\tI
// B opens a mention, I extends it. Blank lines are ignored.
std::vector<LinkingDocument> parse_linking_conll(
    std::string_view text, std::size_t window = kDefaultContextWindow);

// Picks the parser by extension (".jsonl"/".json" or TSV otherwise).
std::vector<LinkingDocument> load_linking_corpus(
    const std::string &path, std::size_t window = kDefaultContextWindow);

// Model file:
//   <dim> <K> <uniform|softmax>
//   local <dim values>
//   pairwise <dim values>
//   relation <dim values>      (K lines)
std::string serialize_model(const LinkingModel &model);
LinkingModel parse_model(std::string_view text);
void save_model(const LinkingModel &model, const std::string &path);
LinkingModel load_model(const std::string &path);

// "<doc_id>\t<mention index>\t<entity>" per line; an empty entity is an
// abstention.
std::string serialize_predictions(const PredictionSet &predictions);
PredictionSet parse_predictions(std::string_view text);

}  // namespace semlink

#endif  // SEMLINK_LINKING_IO_H_
