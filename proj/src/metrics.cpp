#include "geomsign/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace geomsign {

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  r.n = values.size();
  if (r.n == 0) return r;
  double sum = 0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(r.n);
  if (r.n >= 2) {
    double ss = 0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(r.n - 1));
  }
  return r;
}

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
}  // namespace

std::string render_csv(const MetricsTable& table) {
  std::ostringstream os;
  os << "train_views,signers,test_view,variant,top1_mean,top1_std,top3_mean,top3_std,n_folds\n";
  for (const auto& r : table.rows)
    os << r.train_views << ',' << r.signers << ',' << r.test_view << ',' << r.variant << ','
       << fmt(r.top1_mean) << ',' << fmt(r.top1_std) << ',' << fmt(r.top3_mean) << ','
       << fmt(r.top3_std) << ',' << r.n_folds << '\n';
  return os.str();
}

std::string format_gain(double gain) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.2f", gain);
  // paper-style ".08" without the leading zero
  std::string s = buf;
  const auto zero = s.find("0.");
  if (zero == 1) s.erase(1, 1);
  return s;
}

std::string render_markdown(const MetricsTable& table) {
  bool has_both = false;
  {
    bool inv = false, base = false;
    for (const auto& r : table.rows) {
      inv |= r.variant == "invariant";
      base |= r.variant == "baseline";
    }
    has_both = inv && base;
  }

  auto find_baseline = [&](const MetricsRow& row) -> const MetricsRow* {
    for (const auto& r : table.rows)
      if (r.variant == "baseline" && r.train_views == row.train_views &&
          r.signers == row.signers && r.test_view == row.test_view)
        return &r;
    return nullptr;
  };

  std::ostringstream os;
  os << "| train views | signers | test view | variant | top1 | top3 |";
  if (has_both) os << " abs gain |";
  os << '\n';
  os << "|---|---|---|---|---|---|";
  if (has_both) os << "---|";
  os << '\n';
  char buf[64];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof(buf), ".%02d (+-.%02d)", static_cast<int>(r.top1_mean * 100 + 0.5),
                  static_cast<int>(r.top1_std * 100 + 0.5));
    std::string top1 = buf;
    std::snprintf(buf, sizeof(buf), ".%02d (+-.%02d)", static_cast<int>(r.top3_mean * 100 + 0.5),
                  static_cast<int>(r.top3_std * 100 + 0.5));
    std::string top3 = buf;
    os << "| " << r.train_views << " | " << r.signers << " | " << r.test_view << " | "
       << r.variant << " | " << top1 << " | " << top3 << " |";
    if (has_both) {
      if (r.variant == "invariant") {
        if (const auto* b = find_baseline(r))
          os << ' ' << format_gain(r.top1_mean - b->top1_mean) << " |";
        else
          os << " - |";
      } else {
        os << " - |";
      }
    }
    os << '\n';
  }
  return os.str();
}

std::vector<RelativeDrop> relative_drops(const MetricsTable& table) {
  std::vector<RelativeDrop> out;
  for (const auto& front : table.rows) {
    if (front.test_view != "f") continue;
    for (const auto& side : table.rows) {
      if (&side == &front || side.test_view == "f") continue;
      if (side.train_views != front.train_views || side.signers != front.signers ||
          side.variant != front.variant)
        continue;
      RelativeDrop d;
      d.train_views = front.train_views;
      d.signers = front.signers;
      d.variant = front.variant;
      d.side_view = side.test_view;
      d.relative_drop =
          front.top1_mean > 0 ? (front.top1_mean - side.top1_mean) / front.top1_mean : 0.0;
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace geomsign
