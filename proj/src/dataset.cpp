#include "slpm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "slpm/error.hpp"

namespace slpm {

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true)
  {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_real(std::string_view s)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(std::string_view s)
{
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Columns
{
  std::vector<int> feature;  // feature index -> column
  int label = -1;
  int subject = -1;
  int intensity = -1;
  int sequence = -1;
  int frame = -1;
  std::size_t arity = 0;
};

Columns parse_header(std::string_view line)
{
  Columns cols;
  const auto names = split(line);
  cols.arity = names.size();
  std::map<long long, int> features;
  for (std::size_t c = 0; c < names.size(); ++c)
  {
    const auto name = names[c];
    const int col = static_cast<int>(c);
    int* slot = nullptr;
    if (name == "label") slot = &cols.label;
    else if (name == "subject") slot = &cols.subject;
    else if (name == "intensity") slot = &cols.intensity;
    else if (name == "sequence") slot = &cols.sequence;
    else if (name == "frame") slot = &cols.frame;
    if (slot)
    {
      if (*slot >= 0) throw ParseError("duplicate column '" + std::string(name) + "'", 1);
      *slot = col;
      continue;
    }
    const auto index = name.size() > 1 && name[0] == 'f' ? to_integer(name.substr(1)) : std::nullopt;
    if (!index || *index < 0) throw ParseError("unknown column '" + std::string(name) + "'", 1);
    if (!features.emplace(*index, col).second)
      throw ParseError("duplicate column '" + std::string(name) + "'", 1);
  }
  if (cols.label < 0) throw ParseError("missing label column", 1);
  if (features.empty()) throw ParseError("no feature columns", 1);
  long long expect = 0;
  for (const auto& [index, col] : features)
  {
    if (index != expect) throw ParseError("feature columns must be f0..f" + std::to_string(features.size() - 1), 1);
    cols.feature.push_back(col);
    ++expect;
  }
  return cols;
}

void group_sequences(Dataset& data)
{
  std::map<std::string, std::size_t> first;
  for (std::size_t i = 0; i < data.sequences.size(); ++i) first.try_emplace(data.sequences[i], first.size());
  std::vector<std::size_t> order(data.sequences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto sa = first.at(data.sequences[a]);
    const auto sb = first.at(data.sequences[b]);
    if (sa != sb) return sa < sb;
    return data.has_frames() && data.frames[a] < data.frames[b];
  });

  Dataset out;
  out.label_names = data.label_names;
  out.features.resize(data.features.rows(), data.features.cols());
  for (std::size_t i = 0; i < order.size(); ++i)
  {
    const std::size_t src = order[i];
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(static_cast<Eigen::Index>(src));
    out.labels.push_back(data.labels[src]);
    out.sequences.push_back(data.sequences[src]);
    if (data.has_subjects()) out.subjects.push_back(data.subjects[src]);
    if (data.has_intensities()) out.intensities.push_back(data.intensities[src]);
    if (data.has_frames()) out.frames.push_back(data.frames[src]);
  }
  data = std::move(out);
}

} // namespace

std::string format_real(double value)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

int intern_label(std::vector<std::string>& names, const std::string& name)
{
  const auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<int>(it - names.begin());
  names.push_back(name);
  return static_cast<int>(names.size()) - 1;
}

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents)
{
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out.flush()) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename onto '" + path.string() + "': " + ec.message());
}

Dataset parse_dataset_csv(const std::string& text)
{
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::string_view all(text);
  std::size_t lineno = 0;
  while (!all.empty())
  {
    const std::size_t nl = all.find('\n');
    const auto line = all.substr(0, nl);
    ++lineno;
    if (!trim(line).empty()) lines.emplace_back(lineno, line);
    if (nl == std::string_view::npos) break;
    all.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw ParseError("empty file: header row is mandatory", 1);
  if (lines.front().first != 1) throw ParseError("header row must be the first line", 1);

  const Columns cols = parse_header(lines.front().second);
  Dataset data;
  const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
  data.features.resize(rows, static_cast<Eigen::Index>(cols.feature.size()));

  for (std::size_t r = 1; r < lines.size(); ++r)
  {
    const auto [no, line] = lines[r];
    const auto fields = split(line);
    if (fields.size() != cols.arity)
      throw ParseError("expected " + std::to_string(cols.arity) + " fields, found " + std::to_string(fields.size()), no);
    const auto row = static_cast<Eigen::Index>(r - 1);
    for (std::size_t f = 0; f < cols.feature.size(); ++f)
    {
      const auto v = to_real(fields[static_cast<std::size_t>(cols.feature[f])]);
      if (!v) throw ParseError("non-numeric value in column f" + std::to_string(f), no);
      data.features(row, static_cast<Eigen::Index>(f)) = *v;
    }
    const auto label = fields[static_cast<std::size_t>(cols.label)];
    if (label.empty()) throw ParseError("empty label", no);
    data.labels.push_back(intern_label(data.label_names, std::string(label)));
    if (cols.subject >= 0) data.subjects.emplace_back(fields[static_cast<std::size_t>(cols.subject)]);
    if (cols.sequence >= 0) data.sequences.emplace_back(fields[static_cast<std::size_t>(cols.sequence)]);
    if (cols.intensity >= 0)
    {
      const auto v = to_real(fields[static_cast<std::size_t>(cols.intensity)]);
      if (!v || *v < 0.0 || *v > 1.0) throw ParseError("intensity must be a real in [0, 1]", no);
      data.intensities.push_back(*v);
    }
    if (cols.frame >= 0)
    {
      const auto v = to_integer(fields[static_cast<std::size_t>(cols.frame)]);
      if (!v) throw ParseError("frame must be an integer", no);
      data.frames.push_back(*v);
    }
  }
  if (data.size() == 0) throw ParseError("no data rows", 1);
  if (data.has_sequences()) group_sequences(data);
  return data;
}

Dataset load_dataset_csv(const std::filesystem::path& path) { return parse_dataset_csv(read_file(path)); }

std::string format_dataset_csv(const Dataset& data)
{
  std::string out;
  for (Eigen::Index f = 0; f < data.dim(); ++f) out += "f" + std::to_string(f) + ",";
  out += "label";
  if (data.has_subjects()) out += ",subject";
  if (data.has_intensities()) out += ",intensity";
  if (data.has_sequences()) out += ",sequence";
  if (data.has_frames()) out += ",frame";
  out += '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i)
  {
    const auto r = static_cast<std::size_t>(i);
    for (Eigen::Index f = 0; f < data.dim(); ++f) out += format_real(data.features(i, f)) + ",";
    out += data.label_names[static_cast<std::size_t>(data.labels[r])];
    if (data.has_subjects()) out += "," + data.subjects[r];
    if (data.has_intensities()) out += "," + format_real(data.intensities[r]);
    if (data.has_sequences()) out += "," + data.sequences[r];
    if (data.has_frames()) out += "," + std::to_string(data.frames[r]);
    out += '\n';
  }
  return out;
}

void save_dataset_csv(const Dataset& data, const std::filesystem::path& path)
{
  write_file_atomic(path, format_dataset_csv(data));
}

} // namespace slpm
