#include "gmhp/presets.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gmhp {

namespace {

constexpr std::uint32_t kFirstBit = 0b01;
constexpr std::uint32_t kSecondBit = 0b10;
constexpr std::uint32_t kBothBits = 0b11;

double exp_decay_integral(double weight, double beta, double t0, double t1, double s) {
  // integral of weight * exp(-beta (u - s)) over [t0, t1], t0 >= s
  return weight / beta * (std::exp(-beta * (t0 - s)) - std::exp(-beta * (t1 - s)));
}

int channel_index(const Mark& mark) {
  auto c = classify_mark(mark);
  if (!c) throw std::invalid_argument("bivariate kernel: mark does not fit the space");
  return static_cast<int>(*c);
}

}  // namespace

double branching_ratio(const ClassicalParams& params) {
  if (params.response_fn) {
    return params.response_integral >= 0.0 ? params.response_integral
                                           : std::numeric_limits<double>::quiet_NaN();
  }
  return params.excitation / params.decay;
}

KernelSpec build_classical(const ClassicalParams& params) {
  if (params.base_rate_fn) {
    if (!(params.base_rate_bound > 0.0))
      throw std::invalid_argument("build_classical: base_rate_fn requires base_rate_bound");
  } else if (!(params.base_rate >= 0.0) || !std::isfinite(params.base_rate)) {
    throw std::invalid_argument("build_classical: base_rate must be finite and nonnegative");
  }
  if (params.response_fn) {
    if (!(params.response_bound > 0.0))
      throw std::invalid_argument("build_classical: response_fn requires response_bound");
  } else {
    if (!(params.decay > 0.0))
      throw std::invalid_argument("build_classical: decay must be positive");
    if (!(params.excitation >= 0.0))
      throw std::invalid_argument("build_classical: excitation must be nonnegative");
  }

  const Mark point = Mark::single(1, 0, 1.0);

  std::vector<BaseChannel> base;
  BaseChannel b;
  b.touched_mask = kFirstBit;
  if (params.base_rate_fn) {
    b.rate = params.base_rate_fn;
    b.rate_bound = params.base_rate_bound;
  } else {
    const double rate = params.base_rate;
    b.rate = [rate](double) { return rate; };
    b.rate_bound = rate;
    b.integrated = [rate](double t0, double t1) { return rate * (t1 - t0); };
  }
  b.sample = [point](double, RngStream&) { return point; };
  base.push_back(std::move(b));

  std::vector<ExcitationChannel> excitation;
  const bool has_response = params.response_fn || params.excitation > 0.0;
  if (has_response) {
    ExcitationChannel ch;
    ch.touched_mask = kFirstBit;
    if (params.response_fn) {
      auto fn = params.response_fn;
      ch.rate = [fn](double t, double s, const Mark&) { return fn(t - s); };
      const double bound = params.response_bound;
      ch.rate_bound = [bound](double, const Mark&) { return bound; };
    } else {
      const double theta = params.excitation;
      const double beta = params.decay;
      ch.rate = [theta, beta](double t, double s, const Mark&) {
        return theta * std::exp(-beta * (t - s));
      };
      ch.rate_bound = [theta](double, const Mark&) { return theta; };
      ch.integrated = [theta, beta](double t0, double t1, double s, const Mark&) {
        return exp_decay_integral(theta, beta, t0, t1, s);
      };
    }
    ch.sample = [point](double, double, const Mark&, RngStream&) { return point; };
    excitation.push_back(std::move(ch));
  }

  KernelSpec spec{MarkSpace::point_labels(1),
                  std::make_shared<ChannelBaseKernel>(std::move(base)),
                  std::make_shared<ChannelExcitationKernel>(std::move(excitation)),
                  {}};
  const double ratio = branching_ratio(params);
  if (std::isnan(ratio)) {
    spec.notes.push_back("branching ratio unknown (response integral not supplied)");
  } else if (ratio >= 1.0) {
    std::ostringstream msg;
    msg << "supercritical: branching ratio " << ratio << " >= 1";
    spec.notes.push_back(msg.str());
  }
  return spec;
}

KernelSpec build_bivariate_exp(const ExpParams& params) {
  params.validate();

  std::vector<BaseChannel> base;
  for (Channel c : kChannels) {
    const int i = static_cast<int>(c);
    const double alpha = params.baseline[i];
    const double beta = params.decay[i];
    const double excess = params.initial[i] - alpha;
    const Mark mark = channel_mark(c);
    BaseChannel ch;
    ch.touched_mask = mark.touched_mask();
    ch.rate = [alpha, beta, excess](double t) { return alpha + excess * std::exp(-beta * t); };
    ch.rate_bound = std::max(params.initial[i], alpha);
    ch.integrated = [alpha, beta, excess](double t0, double t1) {
      return alpha * (t1 - t0) + excess / beta * (std::exp(-beta * t0) - std::exp(-beta * t1));
    };
    ch.sample = [mark](double, RngStream&) { return mark; };
    base.push_back(std::move(ch));
  }

  std::vector<ExcitationChannel> excitation;
  for (Channel c : kChannels) {
    const int i = static_cast<int>(c);
    const double beta = params.decay[i];
    const auto row = params.impact[i];
    const Mark mark = channel_mark(c);
    ExcitationChannel ch;
    ch.touched_mask = mark.touched_mask();
    ch.rate = [row, beta](double t, double s, const Mark& parent) {
      return row[channel_index(parent)] * std::exp(-beta * (t - s));
    };
    ch.rate_bound = [row](double, const Mark& parent) { return row[channel_index(parent)]; };
    ch.integrated = [row, beta](double t0, double t1, double s, const Mark& parent) {
      return exp_decay_integral(row[channel_index(parent)], beta, t0, t1, s);
    };
    ch.sample = [mark](double, double, const Mark&, RngStream&) { return mark; };
    excitation.push_back(std::move(ch));
  }

  return KernelSpec{MarkSpace::point_labels(2),
                    std::make_shared<ChannelBaseKernel>(std::move(base)),
                    std::make_shared<ChannelExcitationKernel>(std::move(excitation)),
                    {}};
}

void BivariateGaussParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(base_rate[i] >= 0.0) || !std::isfinite(base_rate[i]))
      throw std::invalid_argument("BivariateGaussParams: base rates must be nonnegative");
    if (!(base_sigma[i] > 0.0))
      throw std::invalid_argument("BivariateGaussParams: sigmas must be positive");
    if (!(decay[i] > 0.0))
      throw std::invalid_argument("BivariateGaussParams: decays must be positive");
    if (!(impact_own[i] >= 0.0) || !(impact_common[i] >= 0.0))
      throw std::invalid_argument("BivariateGaussParams: impacts must be nonnegative");
  }
  if (impact_own[2] != impact_common[2])
    throw std::invalid_argument(
        "BivariateGaussParams: the common-common impact must agree between impact_own[2] "
        "and impact_common[2]");
}

KernelSpec build_bivariate_gauss(const BivariateGaussParams& params) {
  params.validate();

  std::vector<BaseChannel> base;
  for (Channel c : kChannels) {
    const int i = static_cast<int>(c);
    const double rate = params.base_rate[i];
    const double mean = params.base_mean[i];
    const double sigma = params.base_sigma[i];
    BaseChannel ch;
    ch.touched_mask = (c == Channel::First) ? kFirstBit
                      : (c == Channel::Second) ? kSecondBit
                                               : kBothBits;
    ch.rate = [rate](double) { return rate; };
    ch.rate_bound = rate;
    ch.integrated = [rate](double t0, double t1) { return rate * (t1 - t0); };
    if (c == Channel::Common) {
      ch.sample = [mean, sigma](double, RngStream& rng) {
        const int coords[] = {0, 1};
        const double values[] = {rng.normal(mean, sigma), rng.normal(mean, sigma)};
        return Mark::touching(2, coords, values);
      };
    } else {
      const int coord = i;
      ch.sample = [coord, mean, sigma](double, RngStream& rng) {
        return Mark::single(2, coord, rng.normal(mean, sigma));
      };
    }
    base.push_back(std::move(ch));
  }

  // Rate of a target row given the parent's source channel. Only the
  // diagonal rows and the common row are charged.
  auto impact_of = [params](Channel target, int source) -> double {
    const int r = static_cast<int>(target);
    if (target == Channel::Common) return params.impact_common[source];
    return (r == source) ? params.impact_own[r] : 0.0;
  };

  std::vector<ExcitationChannel> excitation;
  for (Channel target : kChannels) {
    ExcitationChannel ch;
    ch.touched_mask = (target == Channel::First) ? kFirstBit
                      : (target == Channel::Second) ? kSecondBit
                                                    : kBothBits;
    ch.rate = [params, impact_of, target](double t, double s, const Mark& parent) {
      const int src = channel_index(parent);
      return impact_of(target, src) * std::exp(-params.decay[src] * (t - s));
    };
    ch.rate_bound = [impact_of, target](double, const Mark& parent) {
      return impact_of(target, channel_index(parent));
    };
    ch.integrated = [params, impact_of, target](double t0, double t1, double s,
                                                const Mark& parent) {
      const int src = channel_index(parent);
      return exp_decay_integral(impact_of(target, src), params.decay[src], t0, t1, s);
    };
    if (target == Channel::Common) {
      ch.sample = [params](double, double, const Mark& parent, RngStream& rng) {
        const double a = params.mark_scale[2];
        const double sigma = params.base_sigma[2];
        const double m1 =
            parent.coordinate(0).is_dummy() ? 0.0 : a * parent.coordinate(0).value();
        const double m2 =
            parent.coordinate(1).is_dummy() ? 0.0 : a * parent.coordinate(1).value();
        const int coords[] = {0, 1};
        const double values[] = {rng.normal(m1, sigma), rng.normal(m2, sigma)};
        return Mark::touching(2, coords, values);
      };
    } else {
      const int coord = static_cast<int>(target);
      ch.sample = [params, coord](double, double, const Mark& parent, RngStream& rng) {
        const double a = params.mark_scale[coord];
        const double sigma = params.base_sigma[coord];
        const auto& own = parent.coordinate(coord);
        const double mean = own.is_dummy() ? 0.0 : a * own.value();
        return Mark::single(2, coord, rng.normal(mean, sigma));
      };
    }
    excitation.push_back(std::move(ch));
  }

  return KernelSpec{MarkSpace::scalars(2),
                    std::make_shared<ChannelBaseKernel>(std::move(base)),
                    std::make_shared<ChannelExcitationKernel>(std::move(excitation)),
                    {}};
}

void EtasParams::validate() const {
  const int d = locations();
  if (d < 1) throw std::invalid_argument("EtasParams: need at least one location");
  auto check_shape = [d](const std::vector<std::vector<double>>& m, const char* name) {
    if (static_cast<int>(m.size()) != d)
      throw std::invalid_argument(std::string("EtasParams: ") + name + " needs one row per location");
    for (const auto& row : m) {
      if (static_cast<int>(row.size()) != d + 1)
        throw std::invalid_argument(std::string("EtasParams: ") + name +
                                    " rows need one column per source class");
    }
  };
  if (static_cast<int>(cutoff.size()) != d || static_cast<int>(magnitudes.size()) != d)
    throw std::invalid_argument("EtasParams: cutoff/magnitudes need one entry per location");
  if (!weights.empty() && static_cast<int>(weights.size()) != d)
    throw std::invalid_argument("EtasParams: weights must be empty or one row per location");
  check_shape(productivity, "productivity");
  check_shape(magnitude_gain, "magnitude_gain");
  check_shape(offset, "offset");
  check_shape(exponent, "exponent");
  for (int i = 0; i < d; ++i) {
    if (!(background[i] >= 0.0))
      throw std::invalid_argument("EtasParams: background rates must be nonnegative");
    if (magnitudes[i].empty())
      throw std::invalid_argument("EtasParams: magnitude grids must be nonempty");
    if (!weights.empty()) {
      if (weights[i].size() != magnitudes[i].size())
        throw std::invalid_argument("EtasParams: weights must match the magnitude grid");
      double sum = 0.0;
      for (double w : weights[i]) {
        if (!(w >= 0.0)) throw std::invalid_argument("EtasParams: weights must be nonnegative");
        sum += w;
      }
      if (!(sum > 0.0)) throw std::invalid_argument("EtasParams: weights must not all vanish");
    }
    for (int j = 0; j <= d; ++j) {
      if (!(productivity[i][j] >= 0.0))
        throw std::invalid_argument("EtasParams: productivity must be nonnegative");
      if (!(offset[i][j] > 0.0))
        throw std::invalid_argument("EtasParams: offsets must be positive");
      if (!(exponent[i][j] > 0.0))
        throw std::invalid_argument("EtasParams: exponents must be positive");
    }
  }
}

namespace {

// Power-law pulse K / (u + c)^p started at s, integrated over [t0, t1].
double power_law_integral(double k, double c, double p, double t0, double t1, double s) {
  if (k == 0.0) return 0.0;
  const double lo = t0 - s + c;
  const double hi = t1 - s + c;
  if (p == 1.0) return k * std::log(hi / lo);
  return k / (p - 1.0) * (std::pow(lo, 1.0 - p) - std::pow(hi, 1.0 - p));
}

double etas_parent_gain(const EtasParams& params, const Mark& parent, int target,
                        int* source_class) {
  const int d = params.locations();
  const int touched = parent.touched_count();
  if (touched >= 2) {
    *source_class = d;  // common column
    double excess = 0.0;
    for (int l = 0; l < d; ++l) {
      const auto& cm = parent.coordinate(l);
      if (!cm.is_dummy()) excess += cm.value() - params.cutoff[static_cast<std::size_t>(l)];
    }
    return std::exp(params.magnitude_gain[static_cast<std::size_t>(target)]
                                         [static_cast<std::size_t>(d)] *
                    excess);
  }
  int src = 0;
  for (int l = 0; l < d; ++l) {
    if (!parent.coordinate(l).is_dummy()) {
      src = l;
      break;
    }
  }
  *source_class = src;
  const double excess =
      parent.coordinate(src).value() - params.cutoff[static_cast<std::size_t>(src)];
  return std::exp(params.magnitude_gain[static_cast<std::size_t>(target)]
                                       [static_cast<std::size_t>(src)] *
                  excess);
}

std::function<Mark(RngStream&)> magnitude_sampler(const EtasParams& params, int location) {
  const auto grid = params.magnitudes[static_cast<std::size_t>(location)];
  std::vector<double> cumulative;
  double total = 0.0;
  if (params.weights.empty()) {
    for (std::size_t k = 0; k < grid.size(); ++k) cumulative.push_back(total += 1.0);
  } else {
    for (double w : params.weights[static_cast<std::size_t>(location)])
      cumulative.push_back(total += w);
  }
  const int d = params.locations();
  return [grid, cumulative, total, d, location](RngStream& rng) {
    const double u = rng.uniform01() * total;
    std::size_t k = 0;
    while (k + 1 < cumulative.size() && u > cumulative[k]) ++k;
    return Mark::single(d, location, grid[k]);
  };
}

}  // namespace

KernelSpec build_etas(const EtasParams& params) {
  params.validate();
  const int d = params.locations();

  std::vector<CoordinateSpace> coords;
  for (int i = 0; i < d; ++i) {
    coords.push_back(CoordinateSpace{CoordinateKind::Label,
                                     params.magnitudes[static_cast<std::size_t>(i)]});
  }
  MarkSpace space{std::move(coords)};

  std::vector<BaseChannel> base;
  for (int i = 0; i < d; ++i) {
    const double rate = params.background[static_cast<std::size_t>(i)];
    BaseChannel ch;
    ch.touched_mask = 1u << i;
    ch.rate = [rate](double) { return rate; };
    ch.rate_bound = rate;
    ch.integrated = [rate](double t0, double t1) { return rate * (t1 - t0); };
    auto sampler = magnitude_sampler(params, i);
    ch.sample = [sampler](double, RngStream& rng) { return sampler(rng); };
    base.push_back(std::move(ch));
  }

  std::vector<ExcitationChannel> excitation;
  for (int i = 0; i < d; ++i) {
    ExcitationChannel ch;
    ch.touched_mask = 1u << i;
    const auto k_row = params.productivity[static_cast<std::size_t>(i)];
    const auto c_row = params.offset[static_cast<std::size_t>(i)];
    const auto p_row = params.exponent[static_cast<std::size_t>(i)];
    ch.rate = [params, i, k_row, c_row, p_row](double t, double s, const Mark& parent) {
      int src = 0;
      const double gain = etas_parent_gain(params, parent, i, &src);
      const std::size_t j = static_cast<std::size_t>(src);
      return k_row[j] * gain / std::pow(t - s + c_row[j], p_row[j]);
    };
    ch.rate_bound = [params, i, k_row, c_row, p_row](double, const Mark& parent) {
      int src = 0;
      const double gain = etas_parent_gain(params, parent, i, &src);
      const std::size_t j = static_cast<std::size_t>(src);
      return k_row[j] * gain / std::pow(c_row[j], p_row[j]);
    };
    ch.integrated = [params, i, k_row, c_row, p_row](double t0, double t1, double s,
                                                     const Mark& parent) {
      int src = 0;
      const double gain = etas_parent_gain(params, parent, i, &src);
      const std::size_t j = static_cast<std::size_t>(src);
      return power_law_integral(k_row[j] * gain, c_row[j], p_row[j], t0, t1, s);
    };
    auto sampler = magnitude_sampler(params, i);
    ch.sample = [sampler](double, double, const Mark&, RngStream& rng) { return sampler(rng); };
    excitation.push_back(std::move(ch));
  }

  return KernelSpec{std::move(space),
                    std::make_shared<ChannelBaseKernel>(std::move(base)),
                    std::make_shared<ChannelExcitationKernel>(std::move(excitation)),
                    {}};
}

void FinanceCojumpParams::validate() const {
  if (n_assets < 1) throw std::invalid_argument("FinanceCojumpParams: n_assets must be >= 1");
  if (marks.empty()) throw std::invalid_argument("FinanceCojumpParams: need at least one mark");
  const int dim = 2 * n_assets;
  const std::size_t n = marks.size();
  for (const auto& m : marks) {
    if (m.touched.empty())
      throw std::invalid_argument("FinanceCojumpParams: marks must touch a coordinate");
    for (int c : m.touched) {
      if (c < 0 || c >= dim)
        throw std::invalid_argument("FinanceCojumpParams: touched coordinate out of range");
    }
    if (!(m.base_rate >= 0.0))
      throw std::invalid_argument("FinanceCojumpParams: base rates must be nonnegative");
  }
  auto check_shape = [n](const std::vector<std::vector<double>>& m, const char* name) {
    if (m.size() != n)
      throw std::invalid_argument(std::string("FinanceCojumpParams: ") + name +
                                  " needs one row per mark");
    for (const auto& row : m) {
      if (row.size() != n)
        throw std::invalid_argument(std::string("FinanceCojumpParams: ") + name +
                                    " rows need one column per mark");
    }
  };
  check_shape(impact, "impact");
  check_shape(decay, "decay");
  for (const auto& row : impact) {
    for (double v : row) {
      if (!(v >= 0.0))
        throw std::invalid_argument("FinanceCojumpParams: impacts must be nonnegative");
    }
  }
  for (const auto& row : decay) {
    for (double v : row) {
      if (!(v > 0.0))
        throw std::invalid_argument("FinanceCojumpParams: decays must be positive");
    }
  }
}

KernelSpec build_finance_cojump(const FinanceCojumpParams& params) {
  params.validate();
  const int dim = 2 * params.n_assets;

  std::vector<Mark> tuple_marks;
  std::vector<std::uint32_t> masks;
  for (const auto& m : params.marks) {
    std::vector<double> values(m.touched.size(), 1.0);
    Mark mark = Mark::touching(dim, m.touched, values);
    masks.push_back(mark.touched_mask());
    tuple_marks.push_back(std::move(mark));
  }
  // Source classification by touched mask; unknown masks contribute nothing.
  auto source_index = [masks](const Mark& parent) -> int {
    for (std::size_t k = 0; k < masks.size(); ++k) {
      if (parent.touched_mask() == masks[k]) return static_cast<int>(k);
    }
    return -1;
  };

  std::vector<BaseChannel> base;
  for (std::size_t k = 0; k < params.marks.size(); ++k) {
    const double rate = params.marks[k].base_rate;
    const Mark mark = tuple_marks[k];
    BaseChannel ch;
    ch.touched_mask = masks[k];
    ch.rate = [rate](double) { return rate; };
    ch.rate_bound = rate;
    ch.integrated = [rate](double t0, double t1) { return rate * (t1 - t0); };
    ch.sample = [mark](double, RngStream&) { return mark; };
    base.push_back(std::move(ch));
  }

  std::vector<ExcitationChannel> excitation;
  for (std::size_t k = 0; k < params.marks.size(); ++k) {
    const Mark mark = tuple_marks[k];
    const auto impact_row = params.impact[k];
    const auto decay_row = params.decay[k];
    ExcitationChannel ch;
    ch.touched_mask = masks[k];
    ch.rate = [impact_row, decay_row, source_index](double t, double s, const Mark& parent) {
      const int src = source_index(parent);
      if (src < 0) return 0.0;
      const std::size_t j = static_cast<std::size_t>(src);
      return impact_row[j] * std::exp(-decay_row[j] * (t - s));
    };
    ch.rate_bound = [impact_row, source_index](double, const Mark& parent) {
      const int src = source_index(parent);
      return src < 0 ? 0.0 : impact_row[static_cast<std::size_t>(src)];
    };
    ch.integrated = [impact_row, decay_row, source_index](double t0, double t1, double s,
                                                          const Mark& parent) {
      const int src = source_index(parent);
      if (src < 0) return 0.0;
      const std::size_t j = static_cast<std::size_t>(src);
      return exp_decay_integral(impact_row[j], decay_row[j], t0, t1, s);
    };
    ch.sample = [mark](double, double, const Mark&, RngStream&) { return mark; };
    excitation.push_back(std::move(ch));
  }

  return KernelSpec{MarkSpace::point_labels(dim),
                    std::make_shared<ChannelBaseKernel>(std::move(base)),
                    std::make_shared<ChannelExcitationKernel>(std::move(excitation)),
                    {}};
}

std::vector<std::vector<std::pair<double, long long>>> price_paths(const Path& path,
                                                                   int n_assets) {
  if (path.dimension() != 2 * n_assets)
    throw std::invalid_argument("price_paths: path dimension must be 2 * n_assets");
  std::vector<std::vector<std::pair<double, long long>>> out(
      static_cast<std::size_t>(n_assets));
  std::vector<long long> level(static_cast<std::size_t>(n_assets), 0);
  for (const auto& e : path.events()) {
    for (int a = 0; a < n_assets; ++a) {
      const bool up = !e.mark.coordinate(2 * a).is_dummy();
      const bool down = !e.mark.coordinate(2 * a + 1).is_dummy();
      if (!up && !down) continue;
      level[static_cast<std::size_t>(a)] += (up ? 1 : 0) - (down ? 1 : 0);
      out[static_cast<std::size_t>(a)].push_back({e.time, level[static_cast<std::size_t>(a)]});
    }
  }
  return out;
}

}  // namespace gmhp
