// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_MODEL_HPP
#define CQA_MODEL_HPP

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/value.hpp"

namespace cqa {

struct Attribute {
  std::string name;
  ValueType type;

  bool operator==(const Attribute& o) const {
    return name == o.name && type == o.type;
  }
};

/// The single relation schema: a relation name plus an ordered list of
/// typed attributes. Attribute names are unique, arity is at least 1.
class Schema {
public:
  Schema(std::string relation_name, std::vector<Attribute> attributes)
      : relation_name_(std::move(relation_name)),
        attributes_(std::move(attributes)) {
    if (attributes_.empty())
      throw InvalidArgument("schema needs at least one attribute");
    for (std::size_t i = 0; i < attributes_.size(); ++i)
      for (std::size_t j = i + 1; j < attributes_.size(); ++j)
        if (attributes_[i].name == attributes_[j].name)
          throw InvalidArgument("duplicate attribute name '" +
                                attributes_[i].name + "'");
  }

  const std::string& relation_name() const { return relation_name_; }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t arity() const { return attributes_.size(); }
  ValueType type_of(std::size_t pos) const { return attributes_.at(pos).type; }

  std::optional<std::size_t> index_of(const std::string& attr_name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
      if (attributes_[i].name == attr_name) return i;
    return std::nullopt;
  }

  bool operator==(const Schema& o) const {
    return relation_name_ == o.relation_name_ && attributes_ == o.attributes_;
  }

private:
  std::string relation_name_;
  std::vector<Attribute> attributes_;
};

/// A row: a fixed-arity vector of constants.
class Tuple {
public:
  Tuple() = default;
  explicit Tuple(std::vector<Value> values) : values_(std::move(values)) {}

  const std::vector<Value>& values() const { return values_; }
  const Value& at(std::size_t i) const { return values_.at(i); }
  std::size_t size() const { return values_.size(); }

  bool operator==(const Tuple& o) const { return values_ == o.values_; }
  bool operator!=(const Tuple& o) const { return !(*this == o); }
  bool operator<(const Tuple& o) const {
    return std::lexicographical_compare(values_.begin(), values_.end(),
                                        o.values_.begin(), o.values_.end());
  }

  std::size_t hash() const {
    std::size_t seed = values_.size();
    for (const Value& v : values_) boost::hash_combine(seed, v.hash());
    return seed;
  }

  /// Checks types position by position against the schema.
  bool conforms_to(const Schema& schema) const {
    if (values_.size() != schema.arity()) return false;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i].type() != schema.type_of(i)) return false;
    return true;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) s += ",";
      s += values_[i].str();
    }
    return s + ")";
  }

private:
  std::vector<Value> values_;
};

struct TupleHash {
  std::size_t operator()(const Tuple& t) const { return t.hash(); }
};

inline std::ostream& operator<<(std::ostream& os, const Tuple& t) {
  return os << t.str();
}

/// A duplicate-free relation instance. Tuples are kept sorted; their
/// position in the sorted order is the canonical tuple order used by
/// every deterministic scan in the library. Instances are immutable
/// after construction and safe to share across threads.
class Instance {
public:
  Instance(Schema schema, std::vector<Tuple> tuples)
      : schema_(std::move(schema)), tuples_(std::move(tuples)) {
    for (const Tuple& t : tuples_) {
      if (t.size() != schema_.arity())
        throw TypeError("tuple " + t.str() + " has arity " +
                        std::to_string(t.size()) + ", schema expects " +
                        std::to_string(schema_.arity()));
      if (!t.conforms_to(schema_))
        throw TypeError("tuple " + t.str() +
                        " does not match the schema's attribute types");
    }
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
  }

  const Schema& schema() const { return schema_; }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }

  bool contains(const Tuple& t) const {
    return std::binary_search(tuples_.begin(), tuples_.end(), t);
  }

  /// Index of t in canonical order, if present.
  std::optional<std::size_t> index_of(const Tuple& t) const {
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
    if (it == tuples_.end() || !(*it == t)) return std::nullopt;
    return static_cast<std::size_t>(it - tuples_.begin());
  }

  /// Sub-instance keeping the tuples at the given canonical positions.
  Instance restrict_to(const std::vector<std::size_t>& ids) const {
    std::vector<Tuple> kept;
    kept.reserve(ids.size());
    for (std::size_t id : ids) kept.push_back(tuples_.at(id));
    return Instance(schema_, std::move(kept));
  }

private:
  Schema schema_;
  std::vector<Tuple> tuples_;  // sorted, unique
};

/// The set of constants occurring in some tuple of the instance.
inline std::set<Value> active_domain(const Instance& instance) {
  std::set<Value> dom;
  for (const Tuple& t : instance.tuples())
    for (const Value& v : t.values()) dom.insert(v);
  return dom;
}

/// Active-domain values of one type, in canonical order.
inline std::vector<Value> active_domain_of_type(const Instance& instance,
                                                ValueType type) {
  std::vector<Value> out;
  for (const Value& v : active_domain(instance))
    if (v.type() == type) out.push_back(v);
  return out;
}

}  // namespace cqa

#endif  // CQA_MODEL_HPP
