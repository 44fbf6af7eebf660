#ifndef GMHP_MARK_SPACE_HPP
#define GMHP_MARK_SPACE_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gmhp {

// Whether a coordinate carries values from a finite label set or real scalars.
// The distinction only matters for validation and text output; both are stored
// as doubles.
enum class CoordinateKind { Label, Scalar };

struct CoordinateSpace {
  CoordinateKind kind = CoordinateKind::Label;
  std::vector<double> labels = {1.0};  // admissible values when kind == Label
};

// Product mark space: one CoordinateSpace per process coordinate.
class MarkSpace {
 public:
  explicit MarkSpace(std::vector<CoordinateSpace> coordinates);

  // d point coordinates, each with the single label 1.
  static MarkSpace point_labels(int dimension);
  static MarkSpace scalars(int dimension);

  int dimension() const { return static_cast<int>(coordinates_.size()); }
  const CoordinateSpace& coordinate(int i) const;

 private:
  std::vector<CoordinateSpace> coordinates_;
};

// Value of one coordinate of a mark: either a point of that coordinate's
// space or the dummy value meaning "no event for this coordinate".
class CoordinateMark {
 public:
  static CoordinateMark dummy() { return CoordinateMark(); }
  static CoordinateMark of(double value);

  bool is_dummy() const { return dummy_; }
  double value() const;  // throws if dummy

  bool operator==(const CoordinateMark&) const = default;

 private:
  CoordinateMark() = default;
  double value_ = 0.0;
  bool dummy_ = true;
};

// A mark of the d-dimensional process. At least one coordinate is non-dummy;
// the all-dummy tuple is rejected at construction.
class Mark {
 public:
  explicit Mark(std::vector<CoordinateMark> coordinates);

  // Mark touching a single coordinate.
  static Mark single(int dimension, int coordinate, double value);
  // Mark touching every coordinate in `coordinates` with the given values.
  static Mark touching(int dimension, std::span<const int> coordinates,
                       std::span<const double> values);

  int dimension() const { return static_cast<int>(coordinates_.size()); }
  const CoordinateMark& coordinate(int i) const;

  // Bit i set iff coordinate i is non-dummy. Dimension is capped at 32.
  std::uint32_t touched_mask() const { return touched_mask_; }
  int touched_count() const;

  bool operator==(const Mark&) const = default;

 private:
  std::vector<CoordinateMark> coordinates_;
  std::uint32_t touched_mask_ = 0;
};

struct Event {
  double time = 0.0;
  Mark mark;
  int generation = 0;  // cluster generation, 0 = immigrant
};

// Finite-horizon realization: events on (0, horizon], sorted by time.
// Exact time ties are kept (they are measure-zero under the model) but
// counted, and simulation records whether the generation cap was hit.
class Path {
 public:
  Path(std::vector<Event> events, double horizon, int dimension,
       bool truncated = false);

  const std::vector<Event>& events() const { return events_; }
  double horizon() const { return horizon_; }
  int dimension() const { return dimension_; }
  bool truncated() const { return truncated_; }
  std::size_t tie_count() const { return tie_count_; }

  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

 private:
  std::vector<Event> events_;
  double horizon_;
  int dimension_;
  bool truncated_;
  std::size_t tie_count_ = 0;
};

// coordinates_[i] of `mark`; a dummy result means the event does not touch
// coordinate i.
const CoordinateMark& project_coordinate(const Mark& mark, int coordinate);

// True iff at least two coordinates are non-dummy.
bool is_common_event(const Mark& mark);

// Events of `path` whose i-th coordinate is non-dummy, as a 1-dimensional
// path carrying that coordinate's values. Order and generations preserved.
Path coordinate_path(const Path& path, int coordinate);

// Event counts on (0, t] split by the exact set of touched coordinates.
struct CountDecomposition {
  std::vector<long long> per_coordinate;          // events touching coordinate i
  std::map<std::uint32_t, long long> per_subset;  // touched-mask -> count
  long long common = 0;                           // events touching >= 2 coordinates
  long long total = 0;

  long long subset_count(std::uint32_t mask) const;
};

CountDecomposition count_decomposition(const Path& path, double t);

// CSV output: "t,gen,x_1,...,x_d", one row per event, dummy coordinates as
// empty fields, scalar values with 15 significant digits.
void write_events_csv(std::ostream& out, const Path& path, const MarkSpace& space);
// Multi-path variant with a leading path_id column.
void write_events_csv(std::ostream& out, std::span<const Path> paths,
                      const MarkSpace& space);

std::string format_mark_value(double value);

}  // namespace gmhp

#endif
