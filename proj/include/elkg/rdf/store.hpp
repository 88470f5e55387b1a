#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "elkg/rdf/term.hpp"

namespace elkg::rdf {

/// In-memory triple store with three permutation indexes (SPO, POS, OSP).
///
/// Terms are interned into a dictionary; each index is an ordered set of id
/// triples so that any combination of bound slots is answered by a prefix
/// range scan on one index. Readers take a shared lock and writers an
/// exclusive one, so a reader never sees a triple in one index but not the
/// others.
class Store {
public:
  using Id = std::uint32_t;

  Store() = default;
  Store(const Store& other) {
    std::shared_lock lock(other.mutex_);
    copy_from(other);
  }
  Store(Store&& other) noexcept {
    std::unique_lock lock(other.mutex_);
    move_from(std::move(other));
  }
  Store& operator=(const Store& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    copy_from(other);
    return *this;
  }
  Store& operator=(Store&& other) noexcept {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    move_from(std::move(other));
    return *this;
  }

  /// Returns false iff the triple was already present.
  bool insert(const Triple& t) {
    t.validate();
    std::unique_lock lock(mutex_);
    return insert_unlocked(t);
  }

  /// Inserts every triple under one exclusive lock; returns the number newly added.
  std::size_t insert_all(std::span<const Triple> triples) {
    for (const auto& t : triples) t.validate();
    std::unique_lock lock(mutex_);
    std::size_t added = 0;
    for (const auto& t : triples) added += insert_unlocked(t) ? 1 : 0;
    return added;
  }

  [[nodiscard]] std::size_t size() const {
    std::shared_lock lock(mutex_);
    return spo_.size();
  }

  [[nodiscard]] bool empty() const { return size() == 0; }

  [[nodiscard]] bool contains(const Triple& t) const {
    return !match(t.subject, t.predicate, t.object).empty();
  }

  /// All triples matching the bound slots. Uses the index whose key prefix
  /// covers the most bound slots.
  [[nodiscard]] std::vector<Triple> match(const std::optional<Term>& s, const std::optional<Term>& p,
                                          const std::optional<Term>& o) const {
    std::shared_lock lock(mutex_);
    std::optional<Id> si, pi, oi;
    if (s && !(si = lookup(*s))) return {};
    if (p && !(pi = lookup(*p))) return {};
    if (o && !(oi = lookup(*o))) return {};

    std::vector<Triple> out;
    auto emit = [&](Id a, Id b, Id c) { out.emplace_back(terms_[a], terms_[b], terms_[c]); };

    if (s && p && o) {
      if (spo_.count({*si, *pi, *oi})) emit(*si, *pi, *oi);
    } else if (s && p) {
      scan(spo_, {*si, *pi}, [&](const Key& k) { emit(k[0], k[1], k[2]); });
    } else if (p && o) {
      scan(pos_, {*pi, *oi}, [&](const Key& k) { emit(k[2], k[0], k[1]); });
    } else if (o && s) {
      scan(osp_, {*oi, *si}, [&](const Key& k) { emit(k[1], k[2], k[0]); });
    } else if (s) {
      scan(spo_, {*si}, [&](const Key& k) { emit(k[0], k[1], k[2]); });
    } else if (p) {
      scan(pos_, {*pi}, [&](const Key& k) { emit(k[2], k[0], k[1]); });
    } else if (o) {
      scan(osp_, {*oi}, [&](const Key& k) { emit(k[1], k[2], k[0]); });
    } else {
      out.reserve(spo_.size());
      for (const auto& k : spo_) emit(k[0], k[1], k[2]);
    }
    return out;
  }

  [[nodiscard]] std::vector<Triple> triples() const { return match(std::nullopt, std::nullopt, std::nullopt); }

  /// Every distinct term that occurs in some triple.
  [[nodiscard]] std::vector<Term> terms() const {
    std::shared_lock lock(mutex_);
    return terms_;
  }

  /// Number of documents loaded so far; used to scope blank-node labels.
  std::size_t next_document_id() {
    std::unique_lock lock(mutex_);
    return documents_++;
  }

  /// Checks that the three indexes hold the same triple set.
  [[nodiscard]] bool indexes_consistent() const {
    std::shared_lock lock(mutex_);
    if (spo_.size() != pos_.size() || spo_.size() != osp_.size()) return false;
    for (const auto& k : spo_) {
      if (!pos_.count({k[1], k[2], k[0]}) || !osp_.count({k[2], k[0], k[1]})) return false;
    }
    return true;
  }

private:
  using Key = std::array<Id, 3>;
  using Index = std::set<Key>;

  std::optional<Id> lookup(const Term& t) const {
    auto it = ids_.find(t);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  Id intern(const Term& t) {
    auto [it, inserted] = ids_.try_emplace(t, static_cast<Id>(terms_.size()));
    if (inserted) terms_.push_back(t);
    return it->second;
  }

  bool insert_unlocked(const Triple& t) {
    Key spo{intern(t.subject), intern(t.predicate), intern(t.object)};
    if (!spo_.insert(spo).second) return false;
    pos_.insert({spo[1], spo[2], spo[0]});
    osp_.insert({spo[2], spo[0], spo[1]});
    return true;
  }

  template <typename Fn>
  static void scan(const Index& index, std::initializer_list<Id> prefix, Fn&& fn) {
    Key lo{0, 0, 0};
    std::size_t n = 0;
    for (Id id : prefix) lo[n++] = id;
    for (auto it = index.lower_bound(lo); it != index.end(); ++it) {
      for (std::size_t i = 0; i < n; ++i)
        if ((*it)[i] != lo[i]) return;
      fn(*it);
    }
  }

  void copy_from(const Store& other) {
    terms_ = other.terms_;
    ids_ = other.ids_;
    spo_ = other.spo_;
    pos_ = other.pos_;
    osp_ = other.osp_;
    documents_ = other.documents_;
  }

  void move_from(Store&& other) {
    terms_ = std::move(other.terms_);
    ids_ = std::move(other.ids_);
    spo_ = std::move(other.spo_);
    pos_ = std::move(other.pos_);
    osp_ = std::move(other.osp_);
    documents_ = other.documents_;
  }

  mutable std::shared_mutex mutex_;
  std::vector<Term> terms_;
  std::unordered_map<Term, Id> ids_;
  Index spo_;
  Index pos_;
  Index osp_;
  std::size_t documents_ = 0;
};

}  // namespace elkg::rdf
