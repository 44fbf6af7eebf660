#include "gmhp/mark_space.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace gmhp {

MarkSpace::MarkSpace(std::vector<CoordinateSpace> coordinates)
    : coordinates_(std::move(coordinates)) {
  if (coordinates_.empty()) throw std::invalid_argument("MarkSpace: dimension must be >= 1");
  if (coordinates_.size() > 32)
    throw std::invalid_argument("MarkSpace: dimension is capped at 32");
  for (const auto& c : coordinates_) {
    if (c.kind == CoordinateKind::Label && c.labels.empty())
      throw std::invalid_argument("MarkSpace: label coordinate needs a nonempty label set");
  }
}

MarkSpace MarkSpace::point_labels(int dimension) {
  if (dimension < 1) throw std::invalid_argument("MarkSpace: dimension must be >= 1");
  return MarkSpace(std::vector<CoordinateSpace>(static_cast<std::size_t>(dimension),
                                                CoordinateSpace{}));
}

MarkSpace MarkSpace::scalars(int dimension) {
  if (dimension < 1) throw std::invalid_argument("MarkSpace: dimension must be >= 1");
  CoordinateSpace scalar{CoordinateKind::Scalar, {}};
  return MarkSpace(std::vector<CoordinateSpace>(static_cast<std::size_t>(dimension), scalar));
}

const CoordinateSpace& MarkSpace::coordinate(int i) const {
  if (i < 0 || i >= dimension())
    throw std::out_of_range("MarkSpace: coordinate index out of range");
  return coordinates_[static_cast<std::size_t>(i)];
}

CoordinateMark CoordinateMark::of(double value) {
  if (!std::isfinite(value))
    throw std::invalid_argument("CoordinateMark: value must be finite");
  CoordinateMark m;
  m.value_ = value;
  m.dummy_ = false;
  return m;
}

double CoordinateMark::value() const {
  if (dummy_) throw std::logic_error("CoordinateMark: dummy mark has no value");
  return value_;
}

Mark::Mark(std::vector<CoordinateMark> coordinates)
    : coordinates_(std::move(coordinates)) {
  if (coordinates_.empty() || coordinates_.size() > 32)
    throw std::invalid_argument("Mark: dimension must be in [1, 32]");
  for (std::size_t i = 0; i < coordinates_.size(); ++i) {
    if (!coordinates_[i].is_dummy()) touched_mask_ |= (1u << i);
  }
  if (touched_mask_ == 0)
    throw std::invalid_argument("Mark: the all-dummy tuple is not a mark");
}

Mark Mark::single(int dimension, int coordinate, double value) {
  const int coords[] = {coordinate};
  const double values[] = {value};
  return touching(dimension, coords, values);
}

Mark Mark::touching(int dimension, std::span<const int> coordinates,
                    std::span<const double> values) {
  if (dimension < 1) throw std::invalid_argument("Mark: dimension must be >= 1");
  if (coordinates.size() != values.size())
    throw std::invalid_argument("Mark: coordinate/value size mismatch");
  std::vector<CoordinateMark> coords(static_cast<std::size_t>(dimension),
                                     CoordinateMark::dummy());
  for (std::size_t k = 0; k < coordinates.size(); ++k) {
    const int i = coordinates[k];
    if (i < 0 || i >= dimension)
      throw std::out_of_range("Mark: coordinate index out of range");
    coords[static_cast<std::size_t>(i)] = CoordinateMark::of(values[k]);
  }
  return Mark(std::move(coords));
}

const CoordinateMark& Mark::coordinate(int i) const {
  if (i < 0 || i >= dimension())
    throw std::out_of_range("Mark: coordinate index out of range");
  return coordinates_[static_cast<std::size_t>(i)];
}

int Mark::touched_count() const {
  return std::popcount(touched_mask_);
}

Path::Path(std::vector<Event> events, double horizon, int dimension, bool truncated)
    : events_(std::move(events)),
      horizon_(horizon),
      dimension_(dimension),
      truncated_(truncated) {
  if (!(horizon_ > 0.0)) throw std::invalid_argument("Path: horizon must be positive");
  if (dimension_ < 1) throw std::invalid_argument("Path: dimension must be >= 1");
  double prev = 0.0;
  bool first = true;
  for (const auto& e : events_) {
    if (e.mark.dimension() != dimension_)
      throw std::invalid_argument("Path: event mark dimension mismatch");
    if (!(e.time > 0.0) || e.time > horizon_)
      throw std::invalid_argument("Path: event time outside (0, horizon]");
    if (!first) {
      if (e.time < prev) throw std::invalid_argument("Path: events not time-sorted");
      if (e.time == prev) ++tie_count_;
    }
    prev = e.time;
    first = false;
  }
}

const CoordinateMark& project_coordinate(const Mark& mark, int coordinate) {
  return mark.coordinate(coordinate);
}

bool is_common_event(const Mark& mark) { return mark.touched_count() >= 2; }

Path coordinate_path(const Path& path, int coordinate) {
  if (coordinate < 0 || coordinate >= path.dimension())
    throw std::out_of_range("coordinate_path: coordinate index out of range");
  std::vector<Event> filtered;
  for (const auto& e : path.events()) {
    const auto& cm = e.mark.coordinate(coordinate);
    if (cm.is_dummy()) continue;
    filtered.push_back(Event{e.time, Mark::single(1, 0, cm.value()), e.generation});
  }
  return Path(std::move(filtered), path.horizon(), 1, path.truncated());
}

long long CountDecomposition::subset_count(std::uint32_t mask) const {
  auto it = per_subset.find(mask);
  return it == per_subset.end() ? 0 : it->second;
}

CountDecomposition count_decomposition(const Path& path, double t) {
  if (!(t >= 0.0) || t > path.horizon())
    throw std::invalid_argument("count_decomposition: t outside [0, horizon]");
  CountDecomposition out;
  out.per_coordinate.assign(static_cast<std::size_t>(path.dimension()), 0);
  for (const auto& e : path.events()) {
    if (e.time > t) break;
    ++out.total;
    const std::uint32_t mask = e.mark.touched_mask();
    ++out.per_subset[mask];
    if (e.mark.touched_count() >= 2) ++out.common;
    for (int i = 0; i < path.dimension(); ++i) {
      if (mask & (1u << i)) ++out.per_coordinate[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

std::string format_mark_value(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", value);
  return std::string(buf);
}

namespace {

void write_event_row(std::ostream& out, const Event& e) {
  out << format_mark_value(e.time) << ',' << e.generation;
  for (int i = 0; i < e.mark.dimension(); ++i) {
    out << ',';
    const auto& cm = e.mark.coordinate(i);
    if (!cm.is_dummy()) out << format_mark_value(cm.value());
  }
  out << '\n';
}

void write_header(std::ostream& out, int dimension, bool with_path_id) {
  if (with_path_id) out << "path_id,";
  out << "t,gen";
  for (int i = 1; i <= dimension; ++i) out << ",x_" << i;
  out << '\n';
}

}  // namespace

void write_events_csv(std::ostream& out, const Path& path, const MarkSpace& space) {
  if (space.dimension() != path.dimension())
    throw std::invalid_argument("write_events_csv: space/path dimension mismatch");
  write_header(out, path.dimension(), false);
  for (const auto& e : path.events()) write_event_row(out, e);
}

void write_events_csv(std::ostream& out, std::span<const Path> paths,
                      const MarkSpace& space) {
  const int d = space.dimension();
  write_header(out, d, true);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    if (paths[p].dimension() != d)
      throw std::invalid_argument("write_events_csv: space/path dimension mismatch");
    for (const auto& e : paths[p].events()) {
      out << p << ',';
      write_event_row(out, e);
    }
  }
}

}  // namespace gmhp
