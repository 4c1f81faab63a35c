// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace cifs {

Word::Word(std::vector<int> letters, int k) : letters_(std::move(letters)), k_(k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "alphabet size must be >= 1");
  for (int l : letters_)
    if (l < 1 || l > k) throw Error(ErrorKind::InvalidArgument, "letter " + std::to_string(l) + " outside {1.." + std::to_string(k) + "}");
}

void Word::push_back(int letter) {
  if (letter < 1 || letter > k_) throw Error(ErrorKind::InvalidArgument, "letter outside alphabet");
  letters_.push_back(letter);
}

void Word::append(const Word& w) {
  for (int l : w.letters()) push_back(l);
}

Word Word::prefix(std::size_t n) const {
  n = std::min(n, letters_.size());
  return Word(std::vector<int>(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(n)), k_);
}

Word Word::suffix_from(std::size_t start) const {
  start = std::min(start, letters_.size());
  return Word(std::vector<int>(letters_.begin() + static_cast<std::ptrdiff_t>(start), letters_.end()), k_);
}

Word Word::reversed() const { return Word(std::vector<int>(letters_.rbegin(), letters_.rend()), k_); }

std::optional<std::size_t> find_factor(const Word& w, const Word& pattern, std::size_t from) {
  const auto& a = w.letters();
  const auto& b = pattern.letters();
  if (from > a.size()) return std::nullopt;
  auto it = std::search(a.begin() + static_cast<std::ptrdiff_t>(from), a.end(), b.begin(), b.end());
  if (it == a.end() && !b.empty()) return std::nullopt;
  return static_cast<std::size_t>(it - a.begin());
}

namespace {

void check_distribution(const std::vector<double>& d, std::size_t k, const char* what) {
  if (d.size() != k) throw Error(ErrorKind::InvalidModel, std::string(what) + " has wrong length");
  double s = 0.0;
  for (double v : d) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::InvalidModel, std::string(what) + " has a negative entry");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw Error(ErrorKind::InvalidModel, std::string(what) + " does not sum to 1");
}

double resolve_floor(double min_entry, std::optional<double> p, std::size_t k) {
  double floor = p.value_or(min_entry);
  if (!(floor > 0.0)) throw Error(ErrorKind::InvalidModel, "probability floor p must be > 0");
  if (floor > 1.0 / static_cast<double>(k) + 1e-12) throw Error(ErrorKind::InvalidModel, "probability floor p must be <= 1/k");
  if (min_entry < floor - 1e-12) throw Error(ErrorKind::InvalidModel, "a conditional probability is below the floor p");
  return floor;
}

}  // namespace

SequenceModel SequenceModel::bernoulli(std::vector<double> weights, std::optional<double> p) {
  if (weights.empty()) throw Error(ErrorKind::InvalidModel, "empty weight vector");
  check_distribution(weights, weights.size(), "weights");
  SequenceModel m;
  m.kind_ = Kind::Bernoulli;
  m.p_ = resolve_floor(*std::min_element(weights.begin(), weights.end()), p, weights.size());
  m.initial_ = std::move(weights);
  return m;
}

SequenceModel SequenceModel::markov(std::vector<std::vector<double>> rows, std::vector<double> initial,
                                    std::optional<double> p) {
  std::size_t k = rows.size();
  if (k == 0) throw Error(ErrorKind::InvalidModel, "empty transition matrix");
  if (initial.empty()) initial.assign(k, 1.0 / static_cast<double>(k));
  check_distribution(initial, k, "initial distribution");
  double min_entry = *std::min_element(initial.begin(), initial.end());
  for (const auto& r : rows) {
    check_distribution(r, k, "transition row");
    min_entry = std::min(min_entry, *std::min_element(r.begin(), r.end()));
  }
  SequenceModel m;
  m.kind_ = Kind::Markov;
  m.p_ = resolve_floor(min_entry, p, k);
  m.initial_ = std::move(initial);
  m.rows_ = std::move(rows);
  return m;
}

double SequenceModel::prob(int prev, int next) const {
  if (kind_ == Kind::Bernoulli || prev == 0) return initial_.at(static_cast<std::size_t>(next - 1));
  return rows_.at(static_cast<std::size_t>(prev - 1)).at(static_cast<std::size_t>(next - 1));
}

int SequenceModel::draw(const std::vector<double>& dist, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
    acc += dist[i];
    if (u < acc) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(dist.size());
}

SequenceStream::SequenceStream(SequenceModel model, std::uint64_t seed, std::uint64_t stream_id)
    : model_(std::move(model)), rng_(seed, stream_id), letters_({}, model_.alphabet()) {}

const Word& SequenceStream::prefix(std::size_t n) {
  while (letters_.size() < n) {
    std::size_t i = letters_.size();
    double u = static_cast<double>(rng_.at(i) >> 11) * 0x1.0p-53;
    if (model_.kind() == SequenceModel::Kind::Bernoulli || i == 0) {
      letters_.push_back(SequenceModel::draw(model_.initial_, u));
    } else {
      letters_.push_back(SequenceModel::draw(model_.rows_[static_cast<std::size_t>(letters_[i - 1] - 1)], u));
    }
  }
  return letters_;
}

int SequenceStream::letter(std::size_t i) { return prefix(i + 1)[i]; }

Word sample_sequence(const SequenceModel& model, std::size_t length, std::uint64_t seed, std::uint64_t stream_id) {
  SequenceStream s(model, seed, stream_id);
  return s.prefix(length);
}

double cylinder_measure(const SequenceModel& model, const Cylinder& c) {
  const Word& w = c.word;
  if (w.alphabet() > model.alphabet()) throw Error(ErrorKind::InvalidArgument, "cylinder alphabet exceeds model alphabet");
  double m = 1.0;
  int prev = 0;
  for (int l : w.letters()) {
    m *= model.prob(prev, l);
    prev = l;
  }
  return m;
}

bool is_prefix_dense(const Word& w, int depth) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be >= 1");
  const std::uint64_t k = static_cast<std::uint64_t>(w.alphabet());
  std::uint64_t count = 1;
  for (int i = 0; i < depth; ++i) {
    count *= k;
    if (count > (1ULL << 28)) throw Error(ErrorKind::InvalidArgument, "k^depth too large for prefix-density check");
  }
  if (w.size() < static_cast<std::size_t>(depth)) return false;
  // Every shorter word is a prefix of some length-depth word, so checking
  // length exactly `depth` suffices.
  std::vector<bool> seen(count, false);
  std::uint64_t code = 0;
  std::uint64_t distinct = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    code = (code * k + static_cast<std::uint64_t>(w[i] - 1)) % count;
    if (i + 1 >= static_cast<std::size_t>(depth) && !seen[code]) {
      seen[code] = true;
      if (++distinct == count) return true;
    }
  }
  return false;
}

}  // namespace cifs
