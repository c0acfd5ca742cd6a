#pragma once

#include <memory>
#include <utility>

namespace edbc {

/// Immutable shared node handle with deep (structural) equality.
///
/// AST nodes are built once and never mutated, so sharing subtrees between
/// the parsed module, the instrumented module and runtime closures is safe.
template <class T>
class Ref {
 public:
  Ref(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}  // NOLINT

  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }
  const std::shared_ptr<const T>& shared() const { return ptr_; }

  friend bool operator==(const Ref& a, const Ref& b) {
    return a.ptr_ == b.ptr_ || *a.ptr_ == *b.ptr_;
  }

 private:
  std::shared_ptr<const T> ptr_;
};

}  // namespace edbc
