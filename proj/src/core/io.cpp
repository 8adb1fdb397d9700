#include "core/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace soiltag {

namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || errno == ERANGE) throw ConfigError("bad number in CSV: '" + s + "'");
  return v;
}

long parse_long(const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || errno == ERANGE) throw ConfigError("bad integer in CSV: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || errno == ERANGE) throw ConfigError("bad seed in CSV: '" + s + "'");
  return v;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      table.header = split_line(line);
      first = false;
    } else {
      std::vector<std::string> cells = split_line(line);
      if (cells.size() != table.header.size()) {
        throw ConfigError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (first) throw ConfigError("CSV file has no header row");
  return table;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out.push_back(',');
    out += table.header[i];
  }
  out.push_back('\n');
  for (const std::vector<std::string>& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += row[i];
    }
    out.push_back('\n');
  }
  return out;
}

std::string render_raw_csi(const std::vector<std::vector<CsiProfile>>& packets) {
  std::string out = "packet,channel,subcarrier,freq_hz,rx_element,re,im\n";
  for (std::size_t pkt = 0; pkt < packets.size(); ++pkt) {
    for (const CsiProfile& profile : packets[pkt]) {
      for (std::size_t sc = 0; sc < profile.subcarrier_freqs_hz.size(); ++sc) {
        for (int m = 0; m < profile.num_rx; ++m) {
          const cplx& h = profile.at(sc, m);
          out += std::to_string(pkt);
          out.push_back(',');
          out += std::to_string(profile.channel_index);
          out.push_back(',');
          out += std::to_string(sc);
          out.push_back(',');
          out += fmt_double(profile.subcarrier_freqs_hz[sc]);
          out.push_back(',');
          out += std::to_string(m);
          out.push_back(',');
          out += fmt_double(h.real());
          out.push_back(',');
          out += fmt_double(h.imag());
          out.push_back('\n');
        }
      }
    }
  }
  return out;
}

std::vector<std::vector<CsiProfile>> parse_raw_csi(const std::string& text) {
  const CsvTable table = parse_csv(text);
  const int c_pkt = table.column("packet");
  const int c_ch = table.column("channel");
  const int c_sc = table.column("subcarrier");
  const int c_f = table.column("freq_hz");
  const int c_el = table.column("rx_element");
  const int c_re = table.column("re");
  const int c_im = table.column("im");
  if (c_pkt < 0 || c_ch < 0 || c_sc < 0 || c_f < 0 || c_el < 0 || c_re < 0 || c_im < 0) {
    throw ConfigError("raw CSI CSV missing required columns");
  }

  // packet -> channel -> profile under construction
  std::map<long, std::map<long, CsiProfile>> acc;
  std::map<long, std::map<long, std::map<long, double>>> freqs;   // pkt/ch/sc -> freq
  std::map<long, std::map<long, std::map<long, std::map<long, cplx>>>> values;
  long max_elem = -1;
  for (const std::vector<std::string>& row : table.rows) {
    const long pkt = parse_long(row[c_pkt]);
    const long ch = parse_long(row[c_ch]);
    const long sc = parse_long(row[c_sc]);
    const long el = parse_long(row[c_el]);
    values[pkt][ch][sc][el] = {parse_double(row[c_re]), parse_double(row[c_im])};
    freqs[pkt][ch][sc] = parse_double(row[c_f]);
    max_elem = std::max(max_elem, el);
  }
  if (max_elem < 0) throw ConfigError("raw CSI CSV has no data rows");

  std::vector<std::vector<CsiProfile>> packets;
  for (const auto& [pkt, by_channel] : values) {
    std::vector<CsiProfile> capture;
    for (const auto& [ch, by_sc] : by_channel) {
      CsiProfile profile;
      profile.channel_index = static_cast<int>(ch);
      profile.num_rx = static_cast<int>(max_elem + 1);
      profile.subcarrier_freqs_hz.reserve(by_sc.size());
      profile.h.assign(by_sc.size() * profile.num_rx, cplx{});
      std::size_t sc_idx = 0;
      for (const auto& [sc, by_elem] : by_sc) {
        profile.subcarrier_freqs_hz.push_back(freqs[pkt][ch][sc]);
        for (const auto& [el, v] : by_elem) {
          profile.at(sc_idx, static_cast<std::size_t>(el)) = v;
        }
        ++sc_idx;
      }
      capture.push_back(std::move(profile));
    }
    packets.push_back(std::move(capture));
  }
  return packets;
}

std::string render_dataset(const Dataset& dataset) {
  dataset.validate();
  std::string out = "sample,label,env,seed";
  for (double f : dataset.freqs_hz) {
    out += ",g" + std::to_string(static_cast<long long>(f));
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    const DatasetRow& row = dataset.rows[i];
    out += std::to_string(i);
    out.push_back(',');
    out += fmt_double(row.label_percent);
    out.push_back(',');
    out += row.env;
    out.push_back(',');
    out += std::to_string(row.seed);
    for (double g : row.gains_db) {
      out.push_back(',');
      out += fmt_double(g);
    }
    out.push_back('\n');
  }
  return out;
}

Dataset parse_dataset(const std::string& text) {
  const CsvTable table = parse_csv(text);
  const int c_label = table.column("label");
  const int c_env = table.column("env");
  const int c_seed = table.column("seed");
  if (c_label < 0) throw ConfigError("dataset CSV missing 'label' column");

  Dataset dataset;
  std::vector<int> gain_cols;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string& name = table.header[i];
    if (name.size() > 1 && name[0] == 'g' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      dataset.freqs_hz.push_back(parse_double(name.substr(1)));
      gain_cols.push_back(static_cast<int>(i));
    }
  }
  if (gain_cols.empty()) throw ConfigError("dataset CSV has no g<freq> feature columns");

  for (const std::vector<std::string>& row : table.rows) {
    DatasetRow r;
    r.label_percent = parse_double(row[c_label]);
    if (c_env >= 0) r.env = row[c_env];
    if (c_seed >= 0) r.seed = parse_u64(row[c_seed]);
    r.gains_db.reserve(gain_cols.size());
    for (int col : gain_cols) r.gains_db.push_back(parse_double(row[col]));
    dataset.rows.push_back(std::move(r));
  }
  dataset.validate();
  return dataset;
}

std::string render_feature_csv(const std::vector<double>& freqs_hz,
                               const std::vector<double>& gain_db) {
  check_shape(freqs_hz.size() == gain_db.size(), "feature vector length mismatch");
  std::string out = "freq_hz,gain_db\n";
  for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
    out += fmt_double(freqs_hz[i]);
    out.push_back(',');
    out += fmt_double(gain_db[i]);
    out.push_back('\n');
  }
  return out;
}

}  // namespace soiltag
