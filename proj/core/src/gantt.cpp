#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "xsched/simulator.hpp"

namespace xsched {

namespace {

std::string lane_label(const TraceSegment& seg) {
  return seg.xpu_type + std::to_string(seg.instance_id);
}

// Stable symbol per node for the text rendering.
char node_symbol(std::size_t index) {
  static constexpr char kSymbols[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  constexpr std::size_t n = sizeof(kSymbols) - 1;
  return index < n ? kSymbols[index] : '*';
}

std::string format_us(Micros us) {
  return std::to_string(us) + " us";
}

}  // namespace

std::string render_gantt_text(const SimulationTrace& trace) {
  if (trace.segments.empty()) return "(empty trace)\n";

  Micros span = 0;
  std::set<std::string> lane_set;
  std::set<std::string> node_set;
  for (const auto& seg : trace.segments) {
    span = std::max(span, seg.end);
    lane_set.insert(lane_label(seg));
    if (seg.kind == SegmentKind::kRun) node_set.insert(seg.node_id);
  }
  const std::vector<std::string> nodes(node_set.begin(), node_set.end());
  std::map<std::string, char> symbol;
  for (std::size_t i = 0; i < nodes.size(); ++i) symbol[nodes[i]] = node_symbol(i);

  constexpr int kCols = 100;
  const Micros cell = std::max<Micros>(1, (span + kCols - 1) / kCols);
  const int cols = static_cast<int>((span + cell - 1) / cell);

  std::size_t label_width = 0;
  for (const auto& lane : lane_set) label_width = std::max(label_width, lane.size());

  std::map<std::string, std::string> rows;
  for (const auto& lane : lane_set) rows[lane] = std::string(cols, '.');
  for (const auto& seg : trace.segments) {
    std::string& row = rows[lane_label(seg)];
    const char mark = seg.kind == SegmentKind::kRun ? symbol[seg.node_id] : '#';
    const int lo = static_cast<int>(seg.start / cell);
    const int hi = std::min<int>(cols, static_cast<int>((seg.end + cell - 1) / cell));
    for (int c = lo; c < hi; ++c) row[c] = mark;
  }

  std::string out = "0 .. " + format_us(span) + ", 1 col = " + format_us(cell) +
                    ", makespan " + format_us(trace.makespan) + "\n";
  for (const auto& [lane, row] : rows) {
    out += lane;
    out += std::string(label_width - lane.size(), ' ');
    out += " |" + row + "|\n";
  }
  out += "legend:";
  for (const auto& node : nodes) {
    out += ' ';
    out += symbol[node];
    out += '=' + node;
  }
  out += " #=overhead\n";
  return out;
}

std::string render_gantt_svg(const SimulationTrace& trace) {
  static constexpr const char* kPalette[] = {
      "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
      "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};
  constexpr int kPaletteSize = 12;
  constexpr int kLaneHeight = 28;
  constexpr int kLaneGap = 8;
  constexpr int kLeft = 90;
  constexpr int kTop = 30;
  constexpr int kPlotWidth = 900;

  Micros span = 0;
  std::set<std::string> lane_set;
  std::set<std::string> node_set;
  for (const auto& seg : trace.segments) {
    span = std::max(span, seg.end);
    lane_set.insert(lane_label(seg));
    node_set.insert(seg.node_id);
  }
  const std::vector<std::string> lanes(lane_set.begin(), lane_set.end());
  const std::vector<std::string> nodes(node_set.begin(), node_set.end());
  std::map<std::string, int> lane_row;
  for (std::size_t i = 0; i < lanes.size(); ++i) lane_row[lanes[i]] = static_cast<int>(i);
  std::map<std::string, int> node_index;
  for (std::size_t i = 0; i < nodes.size(); ++i) node_index[nodes[i]] = static_cast<int>(i);

  const int height = kTop + static_cast<int>(lanes.size()) * (kLaneHeight + kLaneGap) + 30;
  const int width = kLeft + kPlotWidth + 20;
  const double px_per_us = span > 0 ? static_cast<double>(kPlotWidth) / span : 1.0;

  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\" font-family=\"monospace\" font-size=\"11\">\n",
                width, height, width, height);
  out += buf;
  out +=
      "  <defs><pattern id=\"hatch\" width=\"6\" height=\"6\" "
      "patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">"
      "<rect width=\"6\" height=\"6\" fill=\"#e8e8e8\"/>"
      "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#666666\" stroke-width=\"2\"/>"
      "</pattern></defs>\n";
  std::snprintf(buf, sizeof(buf), "  <text x=\"%d\" y=\"18\">makespan %lld us</text>\n",
                kLeft, static_cast<long long>(trace.makespan));
  out += buf;

  for (const auto& lane : lanes) {
    const int y = kTop + lane_row[lane] * (kLaneHeight + kLaneGap);
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"8\" y=\"%d\">%s</text>\n"
                  "  <rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"#f5f5f5\"/>\n",
                  y + kLaneHeight / 2 + 4, lane.c_str(), kLeft, y, kPlotWidth,
                  kLaneHeight);
    out += buf;
  }

  for (const auto& seg : trace.segments) {
    const int y = kTop + lane_row[lane_label(seg)] * (kLaneHeight + kLaneGap);
    const double x = kLeft + seg.start * px_per_us;
    const double w = std::max(0.5, (seg.end - seg.start) * px_per_us);
    const char* fill_buf;
    std::string fill;
    if (seg.kind == SegmentKind::kRun) {
      fill = kPalette[node_index[seg.node_id] % kPaletteSize];
    } else {
      fill = "url(#hatch)";
    }
    fill_buf = fill.c_str();
    std::snprintf(buf, sizeof(buf),
                  "  <rect x=\"%.2f\" y=\"%d\" width=\"%.2f\" height=\"%d\" fill=\"%s\" "
                  "stroke=\"#333333\" stroke-width=\"0.5\"><title>%s %s [%lld, %lld)"
                  "</title></rect>\n",
                  x, y + 2, w, kLaneHeight - 4, fill_buf, seg.node_id.c_str(),
                  to_string(seg.kind).c_str(), static_cast<long long>(seg.start),
                  static_cast<long long>(seg.end));
    out += buf;
    if (seg.kind == SegmentKind::kRun && w >= 34.0) {
      std::snprintf(buf, sizeof(buf),
                    "  <text x=\"%.2f\" y=\"%d\" fill=\"#ffffff\">%s</text>\n", x + 3,
                    y + kLaneHeight / 2 + 4, seg.node_id.c_str());
      out += buf;
    }
  }

  const int axis_y = kTop + static_cast<int>(lanes.size()) * (kLaneHeight + kLaneGap) + 14;
  for (int tick = 0; tick <= 4; ++tick) {
    const Micros t = span * tick / 4;
    std::snprintf(buf, sizeof(buf), "  <text x=\"%.2f\" y=\"%d\">%lld</text>\n",
                  kLeft + t * px_per_us, axis_y, static_cast<long long>(t));
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace xsched
