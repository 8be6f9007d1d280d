#include "hri/report/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace hri::report {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string rect(const BBox& b, const std::string& style) {
  return "<rect x=\"" + num(b.x_min) + "\" y=\"" + num(b.y_min) + "\" width=\"" +
         num(b.x_max - b.x_min) + "\" height=\"" + num(b.y_max - b.y_min) + "\" " + style + "/>\n";
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string trajectory_svg(const sim::SceneState& before, const sim::SceneState& after,
                           const Polyline& path) {
  const auto w = num(before.frame.width);
  const auto h = num(before.frame.height);
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + w + " " + h +
                  "\" width=\"" + w + "\" height=\"" + h + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& [label, b] : before.objects) {
    s += rect(b, "fill=\"#ddd\" stroke=\"#999\"");
  }
  for (const auto& [label, b] : after.objects) {
    const bool held = after.held && *after.held == label;
    s += rect(b, held ? "fill=\"none\" stroke=\"#c00\" stroke-width=\"2\""
                      : "fill=\"none\" stroke=\"#333\"");
    s += "<text x=\"" + num(b.x_min) + "\" y=\"" + num(b.y_min - 4) +
         "\" font-size=\"14\" font-family=\"sans-serif\">" + xml_escape(label) + "</text>\n";
  }
  if (!path.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#06c\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) s += ' ';
      s += num(path[i][0]) + "," + num(path[i][1]);
    }
    s += "\"/>\n";
    s += "<circle cx=\"" + num(path.front()[0]) + "\" cy=\"" + num(path.front()[1]) +
         "\" r=\"5\" fill=\"#06c\"/>\n";
  }
  s += "<circle cx=\"" + num(after.effector.x) + "\" cy=\"" + num(after.effector.y) +
       "\" r=\"7\" fill=\"none\" stroke=\"#c00\" stroke-width=\"2\"/>\n";
  s += "</svg>\n";
  return s;
}

std::string contributions_svg(const orch::AggregateReport& report) {
  constexpr double kW = 560, kLeft = 50, kBase = 260, kTop = 30;
  const double scale = (kBase - kTop) / 100.0;
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 560 300\" "
                  "width=\"560\" height=\"300\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int pct = 0; pct <= 100; pct += 25) {
    const auto y = num(kBase - pct * scale);
    s += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kW - 10) + "\" y1=\"" + y + "\" y2=\"" +
         y + "\" stroke=\"#eee\"/>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + y + "\" text-anchor=\"end\">" +
         std::to_string(pct) + "%</text>\n";
  }
  const char* names[] = {"STT", "AE", "OD", "RA", "C"};
  const double slot = (kW - kLeft - 10) / 5.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const double time = i < 4 ? report.time_contribution[i] : report.overhead_share;
    const double x = kLeft + slot * static_cast<double>(i) + slot * 0.15;
    const double bw = slot * 0.3;
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(kBase - time * scale) + "\" width=\"" +
         num(bw) + "\" height=\"" + num(time * scale) + "\" fill=\"#06c\"/>\n";
    s += "<text x=\"" + num(x + bw / 2) + "\" y=\"" + num(kBase - time * scale - 4) +
         "\" text-anchor=\"middle\">" + num(time) + "</text>\n";
    if (i < 4) {
      const double err = report.errors.percent[i];
      s += "<rect x=\"" + num(x + bw) + "\" y=\"" + num(kBase - err * scale) + "\" width=\"" +
           num(bw) + "\" height=\"" + num(err * scale) + "\" fill=\"#c60\"/>\n";
      s += "<text x=\"" + num(x + 1.5 * bw) + "\" y=\"" + num(kBase - err * scale - 4) +
           "\" text-anchor=\"middle\">" + num(err) + "</text>\n";
    }
    s += "<text x=\"" + num(x + bw) + "\" y=\"" + num(kBase + 16) + "\" text-anchor=\"middle\">" +
         names[i] + "</text>\n";
  }
  s += "<rect x=\"" + num(kLeft) + "\" y=\"8\" width=\"10\" height=\"10\" fill=\"#06c\"/>"
       "<text x=\"" + num(kLeft + 14) + "\" y=\"17\">time share</text>\n";
  s += "<rect x=\"" + num(kLeft + 100) + "\" y=\"8\" width=\"10\" height=\"10\" fill=\"#c60\"/>"
       "<text x=\"" + num(kLeft + 114) + "\" y=\"17\">error share (" +
       std::to_string(report.errors.failed) + " failed)</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace hri::report
