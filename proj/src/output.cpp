#include "cuspwave/output.hpp"

#include <cstdio>
#include <fstream>

#include "cuspwave/errors.hpp"

namespace cuspwave {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string reports_csv(const std::vector<EnergyReport>& reports) {
  std::string out;
  const auto& cols = EnergyReport::columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  for (const auto& r : reports) {
    const auto v = r.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += format_double(v[i]);
    }
    out += '\n';
  }
  return out;
}

std::string snapshots_csv(const Model& model, const std::vector<Snapshot>& snapshots) {
  std::string out = "t,x,dW,dWt,dq,dqt,W,q,u,s\n";
  const auto& grid = model.grid();
  const double q0 = model.background().q0;
  for (const auto& snap : snapshots) {
    const auto& s = snap.state;
    for (std::size_t i = 0; i < s.dW.size(); ++i) {
      const double W = model.Wb()[i] + s.dW[i];
      const double q = q0 + s.dq[i];
      const auto p = to_uhp(W, q);
      const double row[] = {s.t, grid.x(static_cast<int>(i)), s.dW[i], s.dWt[i], s.dq[i], s.dqt[i], W, q, p.u, p.s};
      for (std::size_t k = 0; k < std::size(row); ++k) {
        if (k) out += ',';
        out += format_double(row[k]);
      }
      out += '\n';
    }
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open '" + tmp.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      f.close();
      std::filesystem::remove(tmp);
      throw Error(ErrorKind::InvalidArgument, "write to '" + tmp.string() + "' failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_atomic(path, doc.dump(2) + "\n"); }

}  // namespace cuspwave
