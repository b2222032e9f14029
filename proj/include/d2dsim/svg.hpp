#pragma once

#include <cstdarg>
#include <cstdio>
#include <string>

namespace d2dsim {

// Minimal SVG assembly with deterministic number formatting. Everything the
// project plots is simple enough that rects, lines, polylines and text cover
// it.
class Svg {
 public:
  Svg(double width, double height) {
    appendf("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
            "viewBox=\"0 0 %g %g\" font-family=\"sans-serif\">\n",
            width, height, width, height);
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& extra = "") {
    appendf("<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"%s\" %s/>\n",
            x, y, w, h, fill.c_str(), extra.c_str());
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0) {
    appendf("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
            "stroke-width=\"%g\"/>\n",
            x1, y1, x2, y2, stroke.c_str(), stroke_width);
  }

  void polyline_begin(const std::string& stroke, double stroke_width) {
    appendf("<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"%g\" points=\"",
            stroke.c_str(), stroke_width);
  }
  void polyline_point(double x, double y) { appendf("%g,%g ", x, y); }
  void polyline_end() { body_ += "\"/>\n"; }

  void text(double x, double y, const std::string& s, double size = 12.0,
            const std::string& anchor = "start") {
    appendf("<text x=\"%g\" y=\"%g\" font-size=\"%g\" text-anchor=\"%s\">%s</text>\n",
            x, y, size, anchor.c_str(), s.c_str());
  }

  std::string finish() { return body_ + "</svg>\n"; }

 private:
  void appendf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    body_ += buf;
  }

  std::string body_;
};

// Deterministic short float formatting shared by CSV and SVG emitters.
inline std::string fmt_g(double v) {
  char buf[64];
  snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace d2dsim
