#pragma once

#include <string>

#include "djl/dupire.hpp"
#include "djl/mc.hpp"
#include "djl/saddle.hpp"

namespace djl::io {

// Model parameter files: {"model": "merton"|"kou"|"nig"|"vg"|"ruin"|"bs",
// "params": {...}}.  Drift fields are optional and derived when absent.
models::ModelSpec read_model_file(const std::string& path);
models::ModelSpec parse_model_json(const std::string& text);
std::string model_to_json(const models::ModelSpec& model);

void write_surface_csv(const pricing::SurfaceGrid& s, const std::string& path);
void write_surface_json(const pricing::SurfaceGrid& s, const std::string& path);
pricing::SurfaceGrid read_surface_csv(const std::string& path);

void write_local_vol_csv(const dupire::LocalVolSurface& s, const std::string& path);

void write_blowup_csv(const saddle::BlowupFit& fit, const std::string& path);

void write_report_csv(const mc::TheoremReport& r, const std::string& path);
void write_report_json(const mc::TheoremReport& r, const std::string& path);
std::string report_to_json(const mc::TheoremReport& r);

std::string saddle_to_json(const saddle::SaddleResult& r);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace djl::io
