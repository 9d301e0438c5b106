// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpt/instance.hpp"
#include "tpt/pattern.hpp"
#include "tpt/sat.hpp"
#include "tpt/transform.hpp"

namespace tpt {

class EncodingTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct EncoderOptions {
  std::size_t max_skeleton = 10000;
  // Per-rule limits on distinct node and tree variables; negative means |V|.
  int max_node_vars = -1;
  int max_tree_vars = -1;
  bool symmetry_breaking = false;
  // Use the layered multi-step construction even for s = 1.
  bool force_layered = false;
  // Restrict intermediate labels to those of the pair instead of the whole alphabet.
  bool per_pair_alphabet = false;
  // s = 1 only: one admissible application position per pair.
  std::optional<std::vector<Position>> fixed_positions;
};

// Bounded node universe: all words over {0..d-1} of length at most h, in pre-order.
struct Skeleton {
  int d = 0;
  int h = 0;
  std::vector<Position> pos;
  std::vector<int> parent;
  std::vector<int> depth;
  std::vector<int> kids;  // kids[a * d + c], -1 when absent

  int size() const { return static_cast<int>(pos.size()); }
  int child(int a, int c) const { return a < 0 || c >= d ? -1 : kids[static_cast<std::size_t>(a) * d + c]; }
  // Index of the word a.w, or -1 outside the skeleton.
  int concat(int a, int w) const;
  int index_of(const Position& p) const;
};

Skeleton make_skeleton(int d, int h, std::size_t cap);

// Label codes inside the encoding: [0, |Σ|) constants, then node variables x_u and
// tree variables Y_u named after the skeleton slot u of their first body occurrence,
// then the unused marker.
struct Encoding {
  LearningInstance instance;
  EncoderOptions options;
  Skeleton skel;
  std::vector<std::string> alphabet;
  bool layered = false;
  CnfFormula cnf;
  VarRegistry registry;

  int sigma() const { return static_cast<int>(alphabet.size()); }
  int node_var_code(int u) const { return sigma() + u; }
  int tree_var_code(int u) const { return sigma() + skel.size() + u; }
  int unused_code() const { return sigma() + 2 * skel.size(); }

  // Registry lookups; nullopt when the variable was never created.
  std::optional<int> body_var(int j, const Position& w, int code) const;
  std::optional<int> head_var(int j, const Position& w, int code) const;
  std::optional<int> map_var(int j, int k, const Position& v, int pair) const;
  std::optional<int> sel_var(int pair) const;
  int label_code(const std::string& label) const;
};

Encoding encode(const LearningInstance& inst, const EncoderOptions& opts = {});

// Reads the rules off a model without any verification.
RuleSet decode_rules(const Encoding& enc, const std::vector<bool>& model);

struct Decoded {
  RuleSet rules;
  // Empty optional for pairs the model leaves unexplained (ratio below 1).
  std::vector<std::optional<ApplicationTrace>> traces;
};

// Decodes and re-verifies every selected pair; throws DecodeError on any mismatch.
Decoded decode(const Encoding& enc, const std::vector<bool>& model);

}  // namespace tpt
