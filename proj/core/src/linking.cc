#include "semlink/linking.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "semlink/errors.h"

namespace semlink {

namespace {

void require_same(std::size_t a, std::size_t b, const char *what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(a) +
                         " vs " + std::to_string(b));
  }
}

double diagonal_form(std::span<const double> a, std::span<const double> w,
                     std::span<const double> b) {
  // w * (a * b) keeps the form exactly symmetric in a and b.
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) sum += w[d] * (a[d] * b[d]);
  return sum;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

LinkingModel LinkingModel::identity(std::size_t dim, std::size_t relation_count) {
  LinkingModel model;
  model.dim = dim;
  model.local.assign(dim, 1.0);
  model.pairwise.assign(dim, 1.0);
  model.relations.assign(relation_count, std::vector<double>(dim, 1.0));
  return model;
}

void LinkingModel::validate() const {
  if (dim == 0) throw ValueError("model dimension must be positive");
  require_same(local.size(), dim, "local diagonal");
  require_same(pairwise.size(), dim, "pairwise diagonal");
  if (!all_finite(local) || !all_finite(pairwise)) {
    throw ValueError("model diagonal has a non-finite entry");
  }
  for (const auto &r : relations) {
    require_same(r.size(), dim, "relation diagonal");
    if (!all_finite(r)) throw ValueError("relation diagonal has a non-finite entry");
  }
}

ContextFeature context_feature(const Mention &mention,
                               const EmbeddingTable &words) {
  ContextFeature feature;
  feature.values.assign(words.dim(), 0.0);
  std::size_t found = 0;
  for (const auto &token : mention.context) {
    auto vec = words.lookup(token);
    if (!vec) {
      ++feature.oov;
      continue;
    }
    ++found;
    for (std::size_t d = 0; d < feature.values.size(); ++d) {
      feature.values[d] += vec->values[d];
    }
  }
  if (found > 0) {
    for (double &v : feature.values) v /= static_cast<double>(found);
  }
  return feature;
}

double local_score(std::span<const double> entity,
                   std::span<const double> weights,
                   std::span<const double> feature) {
  require_same(entity.size(), weights.size(), "local score");
  require_same(entity.size(), feature.size(), "local score");
  return diagonal_form(entity, weights, feature);
}

double pairwise_score(std::span<const double> a, std::span<const double> b,
                      std::span<const double> weights, std::size_t n) {
  if (n < 2) {
    throw InvalidDocumentError("pairwise score needs at least two mentions");
  }
  require_same(a.size(), b.size(), "pairwise score");
  require_same(a.size(), weights.size(), "pairwise score");
  return diagonal_form(a, weights, b) / static_cast<double>(n - 1);
}

double relation_pairwise_score(std::span<const double> a,
                               std::span<const double> b,
                               const LinkingModel &model,
                               std::span<const double> relation_weights) {
  if (relation_weights.size() != model.relation_count()) {
    throw RelationArityError("expected " +
                             std::to_string(model.relation_count()) +
                             " relation weights, got " +
                             std::to_string(relation_weights.size()));
  }
  require_same(a.size(), b.size(), "relation score");
  double sum = 0.0;
  for (std::size_t k = 0; k < model.relation_count(); ++k) {
    require_same(a.size(), model.relations[k].size(), "relation score");
    sum += relation_weights[k] * diagonal_form(a, model.relations[k], b);
  }
  return sum;
}

std::vector<double> relation_weights(const LinkingModel &model,
                                     std::span<const double> feature_i,
                                     std::span<const double> feature_j) {
  const std::size_t k_count = model.relation_count();
  if (k_count == 0) return {};
  if (model.weighting == RelationWeighting::kUniform) {
    return std::vector<double>(k_count, 1.0 / static_cast<double>(k_count));
  }
  std::vector<double> logits(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    require_same(feature_i.size(), model.relations[k].size(), "relation weights");
    logits[k] = diagonal_form(feature_i, model.relations[k], feature_j);
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double &l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (double &l : logits) l /= total;
  return logits;
}

PreparedDocument prepare_document(const LinkingDocument &doc,
                                  const EmbeddingTable &entities,
                                  const EmbeddingTable &words) {
  PreparedDocument prepared;
  prepared.doc_id = doc.doc_id;
  prepared.source_mentions = doc.mentions.size();
  for (std::size_t m = 0; m < doc.mentions.size(); ++m) {
    const Mention &mention = doc.mentions[m];
    std::vector<std::string> labels = mention.candidates;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    PreparedMention pm;
    pm.source_index = m;
    for (auto &label : labels) {
      auto vec = entities.lookup(label);
      if (!vec) {
        ++prepared.dropped_candidates;
        continue;
      }
      pm.vectors.emplace_back(vec->values.begin(), vec->values.end());
      pm.labels.push_back(std::move(label));
    }
    if (pm.labels.empty()) {
      if (mention.gold) prepared.unscorable_gold.emplace_back(m, *mention.gold);
      continue;
    }
    if (mention.gold) {
      auto it = std::lower_bound(pm.labels.begin(), pm.labels.end(), *mention.gold);
      if (it != pm.labels.end() && *it == *mention.gold) {
        pm.gold = static_cast<std::size_t>(it - pm.labels.begin());
      } else {
        pm.gold_missing = true;
      }
    }
    if (words.dim() != 0 && words.dim() != entities.dim()) {
      throw DimensionError("word and entity tables differ in dimension");
    }
    pm.feature = context_feature(mention, words).values;
    if (pm.feature.empty()) pm.feature.assign(entities.dim(), 0.0);
    prepared.mentions.push_back(std::move(pm));
  }
  return prepared;
}

std::vector<PreparedDocument> prepare_documents(
    std::span<const LinkingDocument> docs, const EmbeddingTable &entities,
    const EmbeddingTable &words) {
  std::vector<PreparedDocument> out;
  out.reserve(docs.size());
  for (const auto &doc : docs) out.push_back(prepare_document(doc, entities, words));
  return out;
}

namespace {

// Pairwise term between candidate a of mention i and candidate b of mention j.
double pair_term(const PreparedDocument &doc, const LinkingModel &model,
                 std::size_t i, std::span<const double> a, std::size_t j,
                 std::span<const double> b) {
  if (model.relation_count() == 0) {
    return pairwise_score(a, b, model.pairwise, doc.mentions.size());
  }
  const auto weights =
      relation_weights(model, doc.mentions[i].feature, doc.mentions[j].feature);
  return relation_pairwise_score(a, b, model, weights);
}

void check_assignment(const PreparedDocument &doc, const Assignment &assignment) {
  if (assignment.size() != doc.mentions.size()) {
    throw InvalidDocumentError("assignment covers " +
                               std::to_string(assignment.size()) + " of " +
                               std::to_string(doc.mentions.size()) + " mentions");
  }
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= doc.mentions[i].labels.size()) {
      throw InvalidDocumentError("candidate index out of range for mention " +
                                 std::to_string(i));
    }
  }
}

}  // namespace

double document_score(const PreparedDocument &doc, const LinkingModel &model,
                      const Assignment &assignment) {
  check_assignment(doc, assignment);
  double total = 0.0;
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const auto &m = doc.mentions[i];
    total += local_score(m.vectors[assignment[i]], model.local, m.feature);
  }
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    for (std::size_t j = i + 1; j < doc.mentions.size(); ++j) {
      total += pair_term(doc, model, i, doc.mentions[i].vectors[assignment[i]],
                         j, doc.mentions[j].vectors[assignment[j]]);
    }
  }
  return total;
}

double document_score(const PreparedDocument &doc, const LinkingModel &model,
                      std::span<const std::string> labels) {
  if (labels.size() != doc.mentions.size()) {
    throw InvalidDocumentError("one label per mention required");
  }
  Assignment assignment(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto &cands = doc.mentions[i].labels;
    auto it = std::lower_bound(cands.begin(), cands.end(), labels[i]);
    if (it == cands.end() || *it != labels[i]) {
      throw InvalidDocumentError("'" + labels[i] +
                                 "' is not a candidate of mention " +
                                 std::to_string(i));
    }
    assignment[i] = static_cast<std::size_t>(it - cands.begin());
  }
  return document_score(doc, model, assignment);
}

namespace {

Assignment greedy_local(const PreparedDocument &doc, const LinkingModel &model) {
  Assignment out(doc.mentions.size(), 0);
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const auto &m = doc.mentions[i];
    double best = -INFINITY;
    for (std::size_t a = 0; a < m.labels.size(); ++a) {
      const double s = local_score(m.vectors[a], model.local, m.feature);
      if (s > best) {  // labels are sorted, so ties keep the smaller one
        best = s;
        out[i] = a;
      }
    }
  }
  return out;
}

Assignment exhaustive(const PreparedDocument &doc, const LinkingModel &model) {
  const std::size_t n = doc.mentions.size();
  std::uint64_t product = 1;
  for (const auto &m : doc.mentions) {
    product *= m.labels.size();
    if (product > kMaxExhaustiveAssignments) {
      throw CapacityError("document '" + doc.doc_id +
                          "' has more than " +
                          std::to_string(kMaxExhaustiveAssignments) +
                          " candidate assignments; use greedy-local inference");
    }
  }
  if (n == 0) return {};

  std::vector<std::vector<double>> local(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto &m = doc.mentions[i];
    for (const auto &v : m.vectors) {
      local[i].push_back(local_score(v, model.local, m.feature));
    }
  }
  // pair[j][i] holds the j<i table, row-major over (candidate of j, of i).
  std::vector<std::vector<std::vector<double>>> pair(n, std::vector<std::vector<double>>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j + 1; i < n; ++i) {
      auto &table = pair[j][i];
      const auto &mj = doc.mentions[j];
      const auto &mi = doc.mentions[i];
      table.resize(mj.labels.size() * mi.labels.size());
      for (std::size_t b = 0; b < mj.labels.size(); ++b) {
        for (std::size_t a = 0; a < mi.labels.size(); ++a) {
          table[b * mi.labels.size() + a] =
              pair_term(doc, model, j, mj.vectors[b], i, mi.vectors[a]);
        }
      }
    }
  }

  // Depth-first enumeration in lexicographic label order; only a strictly
  // better score replaces the incumbent.
  Assignment current(n, 0), best(n, 0);
  std::vector<double> partial(n + 1, 0.0);
  double best_score = -INFINITY;
  std::size_t depth = 0;
  std::vector<std::size_t> next(n, 0);
  while (true) {
    if (next[depth] == doc.mentions[depth].labels.size()) {
      if (depth == 0) break;
      next[depth] = 0;
      --depth;
      continue;
    }
    const std::size_t a = next[depth]++;
    current[depth] = a;
    double s = partial[depth] + local[depth][a];
    for (std::size_t j = 0; j < depth; ++j) {
      s += pair[j][depth][current[j] * doc.mentions[depth].labels.size() + a];
    }
    partial[depth + 1] = s;
    if (depth + 1 == n) {
      if (s > best_score) {
        best_score = s;
        best = current;
      }
    } else {
      ++depth;
    }
  }
  return best;
}

}  // namespace

Assignment infer(const PreparedDocument &doc, const LinkingModel &model,
                 InferenceStrategy strategy) {
  return strategy == InferenceStrategy::kExhaustive ? exhaustive(doc, model)
                                                    : greedy_local(doc, model);
}

void collect_predictions(const PreparedDocument &doc,
                         const Assignment &assignment, PredictionSet &out) {
  check_assignment(doc, assignment);
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const auto &m = doc.mentions[i];
    if (!m.gold && !m.gold_missing) continue;
    out[{doc.doc_id, m.source_index}] = m.labels[assignment[i]];
  }
  for (const auto &[index, gold] : doc.unscorable_gold) {
    out[{doc.doc_id, index}] = std::nullopt;
  }
}

GoldSet collect_gold(std::span<const LinkingDocument> docs) {
  GoldSet gold;
  for (const auto &doc : docs) {
    for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
      if (doc.mentions[i].gold) gold[{doc.doc_id, i}] = *doc.mentions[i].gold;
    }
  }
  return gold;
}

GoldSet collect_gold(std::span<const PreparedDocument> docs) {
  GoldSet gold;
  for (const auto &doc : docs) {
    for (const auto &m : doc.mentions) {
      if (m.gold) gold[{doc.doc_id, m.source_index}] = m.labels[*m.gold];
    }
    for (const auto &[index, label] : doc.unscorable_gold) {
      gold[{doc.doc_id, index}] = label;
    }
  }
  return gold;
}

MarginGradient margin_loss_gradient(const PreparedDocument &doc,
                                    std::size_t mention,
                                    const LinkingModel &model,
                                    const TrainConfig &config) {
  if (mention >= doc.mentions.size()) {
    throw InvalidDocumentError("mention index out of range");
  }
  const PreparedMention &m = doc.mentions[mention];
  if (!m.gold) throw InvalidDocumentError("mention has no gold candidate");
  const bool use_pairs = config.train_pairwise && doc.mentions.size() > 1;
  if (use_pairs && model.relation_count() > 0 &&
      model.weighting == RelationWeighting::kSoftmax) {
    throw ConfigError("pairwise training supports uniform relation weights only");
  }

  MarginGradient grad;
  grad.local.assign(model.dim, 0.0);
  grad.pairwise.assign(model.dim, 0.0);
  grad.relations.assign(model.relation_count(), std::vector<double>(model.dim, 0.0));

  // Sum of the other mentions' gold vectors, the only context the pairwise
  // term sees during training.
  std::vector<double> gold_context(model.dim, 0.0);
  if (use_pairs) {
    for (std::size_t j = 0; j < doc.mentions.size(); ++j) {
      const auto &other = doc.mentions[j];
      if (j == mention || !other.gold) continue;
      const auto &g = other.vectors[*other.gold];
      for (std::size_t d = 0; d < model.dim; ++d) gold_context[d] += g[d];
    }
  }
  const double pair_scale =
      use_pairs ? 1.0 / static_cast<double>(doc.mentions.size() - 1) : 0.0;
  const std::vector<double> uniform =
      use_pairs ? relation_weights(model, {}, {}) : std::vector<double>{};

  auto score = [&](const std::vector<double> &x) {
    double s = local_score(x, model.local, m.feature);
    if (!use_pairs) return s;
    if (model.relation_count() == 0) {
      s += pair_scale * diagonal_form(x, model.pairwise, gold_context);
    } else {
      for (std::size_t k = 0; k < model.relation_count(); ++k) {
        s += uniform[k] * diagonal_form(x, model.relations[k], gold_context);
      }
    }
    return s;
  };

  const auto &gold_vec = m.vectors[*m.gold];
  const double gold_score = score(gold_vec);
  for (std::size_t c = 0; c < m.labels.size(); ++c) {
    if (c == *m.gold) continue;
    const auto &neg = m.vectors[c];
    const double violation = config.margin - gold_score + score(neg);
    if (violation <= 0.0) continue;
    grad.loss += violation;
    for (std::size_t d = 0; d < model.dim; ++d) {
      const double diff = neg[d] - gold_vec[d];
      grad.local[d] += diff * m.feature[d];
      if (!use_pairs) continue;
      if (model.relation_count() == 0) {
        grad.pairwise[d] += pair_scale * diff * gold_context[d];
      } else {
        for (std::size_t k = 0; k < model.relation_count(); ++k) {
          grad.relations[k][d] += uniform[k] * diff * gold_context[d];
        }
      }
    }
  }
  return grad;
}

double training_loss(std::span<const PreparedDocument> docs,
                     const LinkingModel &model, const TrainConfig &config) {
  double total = 0.0;
  for (const auto &doc : docs) {
    for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
      if (doc.mentions[i].gold) {
        total += margin_loss_gradient(doc, i, model, config).loss;
      }
    }
  }
  return total;
}

EvalReport evaluate(std::span<const PreparedDocument> docs,
                    const LinkingModel &model, InferenceStrategy strategy) {
  PredictionSet predictions;
  for (const auto &doc : docs) {
    collect_predictions(doc, infer(doc, model, strategy), predictions);
  }
  return micro_f1(predictions, collect_gold(docs));
}

TrainResult train(std::span<const PreparedDocument> train_docs,
                  std::span<const PreparedDocument> dev_docs,
                  const LinkingModel &initial, const TrainConfig &config) {
  initial.validate();
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.margin)) {
    throw ConfigError("learning rate must be positive and margin finite");
  }
  TrainResult result;
  result.model = initial;

  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t d = 0; d < train_docs.size(); ++d) {
    for (std::size_t i = 0; i < train_docs[d].mentions.size(); ++i) {
      const auto &m = train_docs[d].mentions[i];
      if (m.gold) {
        require_same(m.feature.size(), initial.dim, "training mention");
        order.emplace_back(d, i);
      } else if (m.gold_missing) {
        ++result.skipped_mentions;
      }
    }
  }
  if (order.empty()) {
    throw EmptyTrainingError("no training mention has its gold entity among the candidates");
  }
  result.training_mentions = order.size();

  LinkingModel &model = result.model;
  const double lr = config.learning_rate;
  std::mt19937_64 rng(config.seed);
  result.trace.initial_loss = training_loss(train_docs, model, config);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const auto &[d, i] : order) {
      const MarginGradient g = margin_loss_gradient(train_docs[d], i, model, config);
      if (g.loss <= 0.0) continue;
      for (std::size_t k = 0; k < model.dim; ++k) model.local[k] -= lr * g.local[k];
      if (!config.train_pairwise) continue;
      for (std::size_t k = 0; k < model.dim; ++k) model.pairwise[k] -= lr * g.pairwise[k];
      for (std::size_t r = 0; r < model.relation_count(); ++r) {
        for (std::size_t k = 0; k < model.dim; ++k) {
          model.relations[r][k] -= lr * g.relations[r][k];
        }
      }
    }
    result.trace.loss.push_back(training_loss(train_docs, model, config));
    if (!dev_docs.empty()) {
      result.trace.dev_f1.push_back(evaluate(dev_docs, model, config.dev_strategy).f1);
    }
  }
  return result;
}

}  // namespace semlink
