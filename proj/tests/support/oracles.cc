// Copyright 2026 The kgt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace kgt::testing {
namespace {

bool IsWordByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

char Lower(char c) { return (c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c; }

std::vector<std::string> Tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current.push_back(Lower(c));
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

std::string JoinRange(const std::vector<std::string>& tokens, std::size_t i,
                      std::size_t n) {
  std::string out;
  for (std::size_t j = i; j < i + n; ++j) out += tokens[j] + "\x1f";
  return out;
}

// Number of times the n-gram at tokens[i..i+n) occurs in `tokens`.
std::size_t Occurrences(const std::vector<std::string>& tokens,
                        const std::string& gram, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t j = 0; j + n <= tokens.size(); ++j) {
    if (JoinRange(tokens, j, n) == gram) ++count;
  }
  return count;
}

// Clipped overlap and candidate n-gram total for one pair.
std::pair<std::size_t, std::size_t> ClippedOverlap(
    const std::vector<std::string>& cand, const std::vector<std::string>& ref,
    std::size_t n) {
  std::set<std::string> distinct;
  std::size_t total = 0;
  for (std::size_t i = 0; i + n <= cand.size(); ++i) {
    distinct.insert(JoinRange(cand, i, n));
    ++total;
  }
  std::size_t overlap = 0;
  for (const auto& gram : distinct) {
    overlap += std::min(Occurrences(cand, gram, n), Occurrences(ref, gram, n));
  }
  return {overlap, total};
}

double Cosine(const Vector& a, const Vector& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Surfaces under which a KG node can be mentioned.
std::vector<std::string> EntitySurfaces(const KnowledgeGraph& kg,
                                        const EntityId& id,
                                        const std::string& fallback) {
  std::vector<std::string> out;
  if (const Entity* e = kg.FindEntity(id)) {
    out.push_back(e->title);
    for (const auto& a : e->aliases) out.push_back(a);
  }
  out.push_back(fallback);
  return out;
}

std::vector<std::string> ValueSurfaces(const KnowledgeGraph& kg,
                                       const ObjectValue& value) {
  if (value.entity) return EntitySurfaces(kg, *value.entity, value.surface);
  return LiteralAliases(value);
}

struct Scan {
  std::vector<std::string> patterns;
  std::vector<NaiveSpan> spans;

  void Run(const std::string& text) { spans = NaiveMentions(text, patterns); }

  // Spans whose text equals one of `surfaces`.
  std::vector<std::size_t> SpansOf(const std::vector<std::string>& surfaces,
                                   const std::string& text) const {
    std::set<std::string> wanted;
    for (const auto& s : surfaces) wanted.insert(Canon(s));
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (wanted.count(Canon(text.substr(spans[i].start,
                                         spans[i].end - spans[i].start)))) {
        out.push_back(i);
      }
    }
    return out;
  }
};

std::string Collapse(const std::string& text) {
  std::string out;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (space) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

std::string Canon(const std::string& text) {
  std::string out = Collapse(text);
  for (char& c : out) c = Lower(c);
  return out;
}

std::vector<NaiveSpan> NaiveMentions(const std::string& text,
                                     const std::vector<std::string>& surfaces) {
  std::vector<std::string> patterns;
  for (const auto& s : surfaces) patterns.push_back(Canon(s));
  const std::string folded = Canon(text);
  std::vector<NaiveSpan> out;
  std::size_t pos = 0;
  while (pos < folded.size()) {
    std::size_t best = 0;
    std::size_t best_index = 0;
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      const std::string& pat = patterns[p];
      if (pat.empty() || pat.size() <= best) continue;
      if (folded.compare(pos, pat.size(), pat) != 0) continue;
      const std::size_t end = pos + pat.size();
      const bool left_word =
          pos > 0 && IsWordByte(folded[pos - 1]) && IsWordByte(folded[pos]);
      const bool right_word = end < folded.size() &&
                              IsWordByte(folded[end - 1]) &&
                              IsWordByte(folded[end]);
      if (left_word || right_word) continue;
      best = pat.size();
      best_index = p;
    }
    if (best == 0) {
      ++pos;
      continue;
    }
    out.push_back(NaiveSpan{pos, pos + best, best_index});
    pos += best;
  }
  return out;
}

NaiveAlignment NaiveAlign(const KnowledgeGraph& kg, const Sentence& sentence,
                          bool require_subject) {
  NaiveAlignment result;
  const Entity* page = kg.FindEntity(sentence.page_id);
  if (page == nullptr) return result;
  const std::string text = Collapse(sentence.text);

  // First hop: one scan over the page's subject and every object surface.
  Scan first;
  const auto subject_surfaces = EntitySurfaces(kg, page->id, page->title);
  first.patterns = subject_surfaces;
  for (const Triple& t : kg.Outgoing(page->id)) {
    for (auto& s : ValueSurfaces(kg, t.object)) first.patterns.push_back(s);
    if (t.qvalue) {
      for (auto& s : ValueSurfaces(kg, *t.qvalue)) first.patterns.push_back(s);
    }
  }
  first.Run(text);
  const auto subject_spans = first.SpansOf(subject_surfaces, text);
  std::vector<const Triple*> first_hop;
  for (const Triple& t : kg.Outgoing(page->id)) {
    const auto object_spans = first.SpansOf(ValueSurfaces(kg, t.object), text);
    if (object_spans.empty()) continue;
    if (t.qvalue && first.SpansOf(ValueSurfaces(kg, *t.qvalue), text).empty()) {
      continue;
    }
    if (require_subject) {
      bool distinct = false;
      for (std::size_t s : subject_spans) {
        for (std::size_t o : object_spans) distinct = distinct || s != o;
      }
      if (!distinct) continue;
    }
    result.first.insert(OracleKey(t));
    first_hop.push_back(&t);
  }

  // Second hop: a fresh scan over the hubs' object surfaces only.
  std::vector<EntityId> hubs;
  for (const Triple* t : first_hop) {
    if (t->object.entity &&
        std::find(hubs.begin(), hubs.end(), *t->object.entity) == hubs.end()) {
      hubs.push_back(*t->object.entity);
    }
  }
  Scan second;
  for (const EntityId& hub : hubs) {
    for (const Triple& t : kg.Outgoing(hub)) {
      for (auto& s : ValueSurfaces(kg, t.object)) second.patterns.push_back(s);
      if (t.qvalue) {
        for (auto& s : ValueSurfaces(kg, *t.qvalue)) {
          second.patterns.push_back(s);
        }
      }
    }
  }
  if (second.patterns.empty()) return result;
  second.Run(text);
  for (const EntityId& hub : hubs) {
    // Where the hub itself was mentioned in the first-hop scan.
    std::string hub_fallback;
    for (const Triple* t : first_hop) {
      if (t->object.entity == hub) {
        hub_fallback = t->object.surface;
        break;
      }
    }
    std::set<std::pair<std::size_t, std::size_t>> hub_positions;
    for (std::size_t s :
         first.SpansOf(EntitySurfaces(kg, hub, hub_fallback), text)) {
      hub_positions.insert({first.spans[s].start, first.spans[s].end});
    }
    for (const Triple& t : kg.Outgoing(hub)) {
      const auto object_spans =
          second.SpansOf(ValueSurfaces(kg, t.object), text);
      bool elsewhere = false;
      for (std::size_t s : object_spans) {
        elsewhere = elsewhere || !hub_positions.count(
                                     {second.spans[s].start, second.spans[s].end});
      }
      if (!elsewhere) continue;
      if (t.qvalue &&
          second.SpansOf(ValueSurfaces(kg, *t.qvalue), text).empty()) {
        continue;
      }
      const std::string key = OracleKey(t);
      if (!result.first.count(key)) result.second.insert(key);
    }
  }
  return result;
}

std::string OracleKey(const Triple& triple) {
  std::string key = Canon(triple.subject) + "\x1f" + Canon(triple.predicate) +
                    "\x1f" + Canon(triple.object.surface);
  if (triple.qualifier) {
    key += "\x1fQ" + Canon(*triple.qualifier) + "\x1f" +
           Canon(triple.qvalue ? triple.qvalue->surface : "");
  } else {
    key += "\x1f-";
  }
  return key;
}

Prf OracleTriplePrf(const std::vector<Triple>& predicted,
                    const std::vector<Triple>& gold) {
  auto dedup = [](const std::vector<Triple>& graph) {
    std::vector<std::string> keys;
    for (const auto& t : graph) {
      const std::string k = OracleKey(t);
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        keys.push_back(k);
      }
    }
    return keys;
  };
  const auto p = dedup(predicted);
  const auto g = dedup(gold);
  if (p.empty() && g.empty()) return {1.0, 1.0, 1.0};
  if (p.empty() || g.empty()) return {0.0, 0.0, 0.0};
  std::size_t overlap = 0;
  for (const auto& a : p) {
    for (const auto& b : g) {
      if (a == b) ++overlap;
    }
  }
  const double precision = static_cast<double>(overlap) / p.size();
  const double recall = static_cast<double>(overlap) / g.size();
  const double f1 = precision + recall > 0
                        ? 2 * precision * recall / (precision + recall)
                        : 0.0;
  return {precision, recall, f1};
}

double OracleBleu(const std::vector<std::string>& candidates,
                  const std::vector<std::string>& references, int max_order) {
  std::size_t c = 0, r = 0;
  std::vector<std::size_t> matched(max_order + 1, 0), total(max_order + 1, 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto cand = Tokens(candidates[i]);
    const auto ref = Tokens(references[i]);
    c += cand.size();
    r += ref.size();
    for (int n = 1; n <= max_order; ++n) {
      const auto [m, t] = ClippedOverlap(cand, ref, n);
      matched[n] += m;
      total[n] += t;
    }
  }
  if (c == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= max_order; ++n) {
    if (matched[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched[n]) / total[n]);
  }
  const double bp =
      c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / c);
  return bp * std::exp(log_sum / max_order);
}

Prf OracleRouge(const std::string& candidate, const std::string& reference,
                int n) {
  const auto cand = Tokens(candidate);
  const auto ref = Tokens(reference);
  const auto [overlap, cand_total] = ClippedOverlap(cand, ref, n);
  const std::size_t ref_total = ref.size() >= static_cast<std::size_t>(n)
                                    ? ref.size() - n + 1
                                    : 0;
  if (cand_total == 0 || ref_total == 0) return {0.0, 0.0, 0.0};
  const double precision = static_cast<double>(overlap) / cand_total;
  const double recall = static_cast<double>(overlap) / ref_total;
  const double f1 = precision + recall > 0
                        ? 2 * precision * recall / (precision + recall)
                        : 0.0;
  return {precision, recall, f1};
}

std::size_t OracleNearestRank(const std::vector<std::size_t>& values,
                              int percent) {
  std::vector<std::size_t> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t v : sorted) {
    std::size_t at_most = 0;
    for (std::size_t x : sorted) at_most += x <= v ? 1 : 0;
    if (at_most * 100 >= static_cast<std::size_t>(percent) * sorted.size()) {
      return v;
    }
  }
  return sorted.back();
}

std::vector<std::pair<std::string, double>> OracleNearest(
    const EmbeddingTable& table, const std::string& predicate, int k) {
  std::vector<std::pair<std::string, double>> all;
  const Vector& query = table.predicates.at(predicate);
  for (const auto& [label, vec] : table.predicates) {
    if (label != predicate) all.emplace_back(label, Cosine(query, vec));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(k);
  return all;
}

MarginPair FiniteDifferenceGradient(const MarginPair& pair, double margin,
                                    int norm, double step) {
  MarginPair grad = pair;
  auto slots = [](MarginPair& p) {
    return std::vector<Vector*>{&p.head, &p.relation, &p.tail, &p.corrupt_head,
                                &p.corrupt_tail};
  };
  MarginPair probe = pair;
  auto probe_slots = slots(probe);
  auto grad_slots = slots(grad);
  for (std::size_t s = 0; s < probe_slots.size(); ++s) {
    for (std::size_t i = 0; i < probe_slots[s]->size(); ++i) {
      const double saved = (*probe_slots[s])[i];
      (*probe_slots[s])[i] = saved + step;
      const double up = MarginLoss(probe, margin, norm);
      (*probe_slots[s])[i] = saved - step;
      const double down = MarginLoss(probe, margin, norm);
      (*probe_slots[s])[i] = saved;
      (*grad_slots[s])[i] = (up - down) / (2 * step);
    }
  }
  return grad;
}

Confusion OracleConfusion(const std::vector<double>& scores,
                          const std::vector<bool>& labels, double tau) {
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= tau;
    if (predicted && labels[i]) ++c.tp;
    if (predicted && !labels[i]) ++c.fp;
    if (!predicted && labels[i]) ++c.fn;
    if (!predicted && !labels[i]) ++c.tn;
  }
  return c;
}

}  // namespace kgt::testing
