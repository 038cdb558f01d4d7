// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lsgd::model {

struct Segment {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
  bool is_embedding = false;

  bool operator==(const Segment&) const = default;
};

// Contiguous, non-overlapping segments that tile [0, total) exactly.
class SegmentLayout {
 public:
  SegmentLayout() = default;
  // Throws ShapeError when the segments do not tile the range.
  explicit SegmentLayout(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t total() const { return total_; }
  const Segment& find(std::string_view name) const;
  // Segment containing a flat index.
  const Segment& segment_of(std::size_t index) const;

  bool operator==(const SegmentLayout& other) const { return segments_ == other.segments_; }

 private:
  std::vector<Segment> segments_;
  std::size_t total_ = 0;
};

struct NamedTensor {
  std::string name;
  bool is_embedding = false;
  std::vector<double> values;

  bool operator==(const NamedTensor&) const = default;
};

struct NonFiniteValue {
  std::string segment;
  std::size_t index = 0;  // flat index
  double value = 0.0;
};

// Flat parameter storage plus a shared, immutable segment map.
class ParameterVector {
 public:
  ParameterVector() = default;
  // Zero-initialised.
  explicit ParameterVector(std::shared_ptr<const SegmentLayout> layout);
  ParameterVector(std::shared_ptr<const SegmentLayout> layout, std::vector<double> values);

  static ParameterVector zeros_like(const ParameterVector& other);

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }

  const std::vector<Segment>& segments() const { return layout_->segments(); }
  const std::shared_ptr<const SegmentLayout>& layout() const { return layout_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> segment_values(std::string_view name);
  std::span<const double> segment_values(std::string_view name) const;

  bool same_layout(const ParameterVector& other) const;
  std::size_t embedding_count() const;
  std::optional<NonFiniteValue> first_non_finite() const;

  bool operator==(const ParameterVector& other) const;

 private:
  std::shared_ptr<const SegmentLayout> layout_ = std::make_shared<const SegmentLayout>();
  std::vector<double> values_;
};

// Total length minus the lengths of all embedding segments.
std::int64_t count_non_embedding(const ParameterVector& params);

// Throws ShapeError (prefixed with `what`) when the layouts differ.
void require_same_layout(const ParameterVector& a, const ParameterVector& b, std::string_view what);

std::vector<NamedTensor> unflatten(const ParameterVector& params);
ParameterVector flatten(const std::vector<NamedTensor>& tensors);

}  // namespace lsgd::model
