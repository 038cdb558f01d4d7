// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/model/parameter_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "lsgd/core/error.hpp"

namespace lsgd::model {

SegmentLayout::SegmentLayout(std::vector<Segment> segments) : segments_(std::move(segments)) {
  std::size_t expected = 0;
  for (const auto& s : segments_) {
    if (s.offset != expected) {
      throw ShapeError("segment '" + s.name + "' starts at " + std::to_string(s.offset) + ", expected " +
                       std::to_string(expected));
    }
    expected += s.length;
  }
  total_ = expected;
}

const Segment& SegmentLayout::find(std::string_view name) const {
  for (const auto& s : segments_) {
    if (s.name == name) return s;
  }
  throw ShapeError("no segment named '" + std::string(name) + "'");
}

const Segment& SegmentLayout::segment_of(std::size_t index) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), index,
                             [](std::size_t i, const Segment& s) { return i < s.offset + s.length; });
  if (it == segments_.end()) throw ShapeError("index " + std::to_string(index) + " outside parameter vector");
  return *it;
}

ParameterVector::ParameterVector(std::shared_ptr<const SegmentLayout> layout)
    : layout_(std::move(layout)), values_(layout_->total(), 0.0) {}

ParameterVector::ParameterVector(std::shared_ptr<const SegmentLayout> layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_->total()) {
    throw ShapeError("value count " + std::to_string(values_.size()) + " does not match layout total " +
                     std::to_string(layout_->total()));
  }
}

ParameterVector ParameterVector::zeros_like(const ParameterVector& other) { return ParameterVector(other.layout_); }

std::span<double> ParameterVector::segment_values(std::string_view name) {
  const auto& s = layout_->find(name);
  return std::span<double>(values_).subspan(s.offset, s.length);
}

std::span<const double> ParameterVector::segment_values(std::string_view name) const {
  const auto& s = layout_->find(name);
  return std::span<const double>(values_).subspan(s.offset, s.length);
}

bool ParameterVector::same_layout(const ParameterVector& other) const {
  return layout_ == other.layout_ || *layout_ == *other.layout_;
}

std::size_t ParameterVector::embedding_count() const {
  std::size_t n = 0;
  for (const auto& s : layout_->segments()) {
    if (s.is_embedding) n += s.length;
  }
  return n;
}

std::optional<NonFiniteValue> ParameterVector::first_non_finite() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) return NonFiniteValue{layout_->segment_of(i).name, i, values_[i]};
  }
  return std::nullopt;
}

bool ParameterVector::operator==(const ParameterVector& other) const {
  // Bitwise comparison so that -0.0 != 0.0 and identical NaN payloads compare equal.
  return same_layout(other) &&
         std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(double)) == 0;
}

std::int64_t count_non_embedding(const ParameterVector& params) {
  return static_cast<std::int64_t>(params.size() - params.embedding_count());
}

void require_same_layout(const ParameterVector& a, const ParameterVector& b, std::string_view what) {
  if (!a.same_layout(b)) {
    throw ShapeError(std::string(what) + ": layout mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + " values)");
  }
}

std::vector<NamedTensor> unflatten(const ParameterVector& params) {
  std::vector<NamedTensor> out;
  out.reserve(params.segments().size());
  const auto values = params.values();
  for (const auto& s : params.segments()) {
    out.push_back({s.name, s.is_embedding,
                   std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(s.offset),
                                       values.begin() + static_cast<std::ptrdiff_t>(s.offset + s.length))});
  }
  return out;
}

ParameterVector flatten(const std::vector<NamedTensor>& tensors) {
  std::vector<Segment> segments;
  std::vector<double> values;
  for (const auto& t : tensors) {
    segments.push_back({t.name, values.size(), t.values.size(), t.is_embedding});
    values.insert(values.end(), t.values.begin(), t.values.end());
  }
  return ParameterVector(std::make_shared<const SegmentLayout>(std::move(segments)), std::move(values));
}

}  // namespace lsgd::model
