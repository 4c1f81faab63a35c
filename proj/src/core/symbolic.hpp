// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// Finite words over {1..k}, cylinders, and random-sequence models on the
// one-sided shift whose conditional next-letter probabilities are >= p.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rng.hpp"

namespace cifs {

class Word {
 public:
  Word() = default;
  /// Letters are 1-based; throws InvalidArgument when outside {1..k}.
  Word(std::vector<int> letters, int k);

  int alphabet() const { return k_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  int operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<int>& letters() const { return letters_; }

  void push_back(int letter);
  void append(const Word& w);
  Word prefix(std::size_t n) const;
  Word suffix_from(std::size_t start) const;
  Word reversed() const;
  /// Drop the first letter (the shift map).
  Word shifted() const { return suffix_from(1); }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<int> letters_;
  int k_ = 1;
};

/// Smallest start index >= from where `pattern` occurs as a factor of `w`.
std::optional<std::size_t> find_factor(const Word& w, const Word& pattern, std::size_t from = 0);

/// Cylinder C_w = { omega : omega_i = w_i for i <= |w| }.
struct Cylinder {
  Word word;
};

class SequenceModel {
 public:
  enum class Kind { Bernoulli, Markov };

  /// Throws InvalidModel unless weights sum to 1 and each is >= p, with 0 < p <= 1/k.
  static SequenceModel bernoulli(std::vector<double> weights, std::optional<double> p = std::nullopt);
  /// One-step Markov chain; `initial` defaults to uniform.
  static SequenceModel markov(std::vector<std::vector<double>> rows, std::vector<double> initial = {},
                              std::optional<double> p = std::nullopt);
  static SequenceModel uniform(int k) { return bernoulli(std::vector<double>(k, 1.0 / k)); }

  Kind kind() const { return kind_; }
  int alphabet() const { return static_cast<int>(initial_.size()); }
  double floor_p() const { return p_; }
  const std::vector<double>& weights() const { return initial_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  /// P(next | prev); prev = 0 means no preceding letter.
  double prob(int prev, int next) const;

 private:
  SequenceModel() = default;
  static int draw(const std::vector<double>& dist, double u);
  friend class SequenceStream;

  Kind kind_ = Kind::Bernoulli;
  std::vector<double> initial_;
  std::vector<std::vector<double>> rows_;
  double p_ = 0.0;
};

/// An infinite sequence as (model, seed, stream) with a lazily extended prefix.
class SequenceStream {
 public:
  SequenceStream(SequenceModel model, std::uint64_t seed, std::uint64_t stream_id = 0);

  const Word& prefix(std::size_t n);
  int letter(std::size_t i);  // 0-based position, 1-based letter
  const SequenceModel& model() const { return model_; }

 private:
  SequenceModel model_;
  CounterRng rng_;
  Word letters_;
};

Word sample_sequence(const SequenceModel& model, std::size_t length, std::uint64_t seed, std::uint64_t stream_id = 0);

/// Exact product of conditional probabilities along the cylinder word.
double cylinder_measure(const SequenceModel& model, const Cylinder& c);

/// Every word of length <= depth over {1..k} occurs as a factor of w.
bool is_prefix_dense(const Word& w, int depth);

}  // namespace cifs
