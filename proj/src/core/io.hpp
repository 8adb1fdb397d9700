#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/channel.hpp"
#include "core/estimator.hpp"

namespace soiltag {

// Lossless, locale-independent double formatting shared by every CSV
// artifact so reruns are byte-identical.
std::string fmt_double(double v);

// Write via a temp file in the same directory plus rename.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// Generic CSV table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable parse_csv(const std::string& text);
std::string render_csv(const CsvTable& table);

// Raw CSI capture rows: packet,channel,subcarrier,freq_hz,rx_element,re,im.
std::string render_raw_csi(const std::vector<std::vector<CsiProfile>>& packets);
std::vector<std::vector<CsiProfile>> parse_raw_csi(const std::string& text);

// Labeled feature table: sample,label,env,seed plus one g<freq> column
// per feature frequency.
std::string render_dataset(const Dataset& dataset);
Dataset parse_dataset(const std::string& text);

// Single feature vector: freq_hz,gain_db.
std::string render_feature_csv(const std::vector<double>& freqs_hz,
                               const std::vector<double>& gain_db);

}  // namespace soiltag
