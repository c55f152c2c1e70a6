#include "slpm/export.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "slpm/error.hpp"

namespace slpm {

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 40.0;

std::string fixed(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string xml_escape(const std::string& s)
{
  std::string out;
  for (char c : s)
  {
    switch (c)
    {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

} // namespace

std::vector<Provenance> dataset_provenance(const Dataset& data)
{
  std::vector<Provenance> out;
  for (Eigen::Index i = 0; i < data.size(); ++i)
  {
    const double v = data.has_intensities() ? data.intensities[static_cast<std::size_t>(i)] : 1.0;
    if (v == 0.0) out.push_back({Provenance::Kind::neutral, 0.0, static_cast<int>(i), -1});
    else if (v < 1.0) out.push_back({Provenance::Kind::low_intensity, v, static_cast<int>(i), -1});
    else out.push_back({Provenance::Kind::original_peak, 1.0, static_cast<int>(i), -1});
  }
  return out;
}

std::string format_projection_csv(const AugmentedTrainingSet& rows, const std::vector<std::string>& label_names)
{
  std::string out;
  for (Eigen::Index c = 0; c < rows.vectors.cols(); ++c) out += "y" + std::to_string(c) + ",";
  out += "label,provenance\n";
  for (Eigen::Index i = 0; i < rows.size(); ++i)
  {
    const auto r = static_cast<std::size_t>(i);
    for (Eigen::Index c = 0; c < rows.vectors.cols(); ++c) out += format_real(rows.vectors(i, c)) + ",";
    out += label_names.at(static_cast<std::size_t>(rows.labels[r])) + "," + to_string(rows.provenance[r]) + "\n";
  }
  return out;
}

std::string format_projection_svg(const Matrix& Y, const std::vector<int>& labels,
                                  const std::vector<std::string>& label_names)
{
  if (Y.cols() < 2) throw DataError("svg export needs a subspace of at least two dimensions");

  const auto axis = [&](Eigen::Index c, double lo_px, double hi_px) {
    const double lo = Y.rows() ? Y.col(c).minCoeff() : 0.0;
    const double hi = Y.rows() ? Y.col(c).maxCoeff() : 0.0;
    return [=](double v) {
      if (hi - lo <= 0.0) return 0.5 * (lo_px + hi_px);
      return lo_px + (v - lo) / (hi - lo) * (hi_px - lo_px);
    };
  };
  const auto sx = axis(0, kMargin, kWidth - kMargin);
  const auto sy = axis(1, kHeight - kMargin, kMargin);

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
  for (std::size_t c = 0; c < label_names.size(); ++c)
  {
    const double y = 14.0 + 16.0 * static_cast<double>(c);
    out += "<rect x=\"8\" y=\"" + fixed(y - 9.0) + "\" width=\"10\" height=\"10\" fill=\"" +
           kPalette[c % kPalette.size()] + "\"/>";
    out += "<text x=\"22\" y=\"" + fixed(y) + "\" font-size=\"12\">" + xml_escape(label_names[c]) + "</text>\n";
  }
  for (Eigen::Index i = 0; i < Y.rows(); ++i)
  {
    const auto label = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    out += "<circle cx=\"" + fixed(sx(Y(i, 0))) + "\" cy=\"" + fixed(sy(Y(i, 1))) + "\" r=\"3\" fill=\"" +
           kPalette[label % kPalette.size()] + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void export_projection(const EmbeddingModel& model, const Dataset& data, const std::filesystem::path& path,
                       ExportFormat format)
{
  const Matrix Y = project(model, data.features);
  if (format == ExportFormat::svg)
  {
    write_file_atomic(path, format_projection_svg(Y, data.labels, data.label_names));
    return;
  }
  AugmentedTrainingSet rows;
  rows.vectors = Y;
  rows.labels = data.labels;
  rows.provenance = dataset_provenance(data);
  write_file_atomic(path, format_projection_csv(rows, data.label_names));
}

} // namespace slpm
