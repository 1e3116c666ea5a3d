#include "radarcs/frame_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "radarcs/errors.hpp"

namespace radarcs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw IoError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw IoError("write failed for " + path);
}

}  // namespace

std::string sidecar_path(const std::string& png_path) { return png_path + ".json"; }

void save_frame(const PolarFrame& frame, const std::string& png_path) {
    frame.validate();

    double peak = 0.0;
    for (double v : frame.data) peak = std::max(peak, v);
    const double scale = peak > 0.0 ? peak / 65535.0 : 1.0;

    std::vector<std::uint16_t> pixels(frame.data.size());
    for (std::size_t i = 0; i < frame.data.size(); ++i) {
        const double q = std::llround(frame.data[i] / scale);
        pixels[i] = static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
    }

    FilePtr fp(std::fopen(png_path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + png_path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed for " + png_path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(frame.range_bins),
                 static_cast<png_uint_32>(frame.azimuth_bins), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);  // in-memory samples are host (little) endian
    for (int a = 0; a < frame.azimuth_bins; ++a)
        png_write_row(png, reinterpret_cast<png_bytep>(
                               pixels.data() + static_cast<std::size_t>(a) * frame.range_bins));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);

    json meta = {{"azimuth_bins", frame.azimuth_bins},
                 {"range_bins", frame.range_bins},
                 {"range_resolution_m", frame.range_resolution_m},
                 {"azimuth_resolution_deg", frame.azimuth_resolution_deg},
                 {"timestamp_us", frame.timestamp_us},
                 {"scale", scale}};
    write_text_file(sidecar_path(png_path), meta.dump(2) + "\n");
}

PolarFrame load_frame(const std::string& png_path) {
    const json meta = read_json_file(sidecar_path(png_path));

    PolarFrame frame;
    try {
        frame.azimuth_bins = meta.at("azimuth_bins").get<int>();
        frame.range_bins = meta.at("range_bins").get<int>();
        frame.range_resolution_m = meta.at("range_resolution_m").get<double>();
        frame.azimuth_resolution_deg = meta.at("azimuth_resolution_deg").get<double>();
        frame.timestamp_us = meta.at("timestamp_us").get<std::int64_t>();
    } catch (const json::exception& e) {
        throw IoError("bad frame sidecar " + sidecar_path(png_path) + ": " + e.what());
    }
    const double scale = meta.value("scale", 1.0);

    FilePtr fp(std::fopen(png_path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + png_path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG read failed for " + png_path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth != 16 || color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(png_path + ": expected 16-bit grayscale PNG");
    }
    if (width != static_cast<png_uint_32>(frame.range_bins) ||
        height != static_cast<png_uint_32>(frame.azimuth_bins)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(png_path + ": PNG dims disagree with sidecar");
    }
    png_set_swap(png);

    std::vector<std::uint16_t> pixels(static_cast<std::size_t>(width) * height);
    for (png_uint_32 a = 0; a < height; ++a)
        png_read_row(png, reinterpret_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(a) * width),
                     nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    frame.data.resize(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) frame.data[i] = pixels[i] * scale;
    frame.validate();
    return frame;
}

std::vector<DetectionSet> load_detections(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::vector<DetectionSet> sets;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
        }
        DetectionSet set;
        try {
            set.timestamp_us = j.at("timestamp_us").get<std::int64_t>();
            set.camera = camera_from_name(j.at("camera").get<std::string>());
            set.image_width = j.at("image_width").get<int>();
            set.image_height = j.at("image_height").get<int>();
            for (const auto& b : j.at("boxes")) {
                BoundingBox box;
                box.x1 = b.at("x1").get<double>();
                box.y1 = b.at("y1").get<double>();
                box.x2 = b.at("x2").get<double>();
                box.y2 = b.at("y2").get<double>();
                box.class_label = b.at("class").get<std::string>();
                box.score = b.at("score").get<double>();
                if (!(box.score >= 0.0 && box.score <= 1.0))
                    throw ValidationError("score outside [0,1]");
                set.boxes.push_back(std::move(box));
            }
        } catch (const json::exception& e) {
            throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

void save_detections(const std::vector<DetectionSet>& sets, const std::string& path) {
    std::ostringstream os;
    for (const auto& set : sets) {
        json j = {{"timestamp_us", set.timestamp_us},
                  {"camera", camera_name(set.camera)},
                  {"image_width", set.image_width},
                  {"image_height", set.image_height}};
        auto boxes = json::array();
        for (const auto& b : set.boxes)
            boxes.push_back({{"x1", b.x1},
                             {"y1", b.y1},
                             {"x2", b.x2},
                             {"y2", b.y2},
                             {"class", b.class_label},
                             {"score", b.score}});
        j["boxes"] = std::move(boxes);
        os << j.dump() << "\n";
    }
    write_text_file(path, os.str());
}

std::string SceneManifest::resolve(const std::string& rel) const {
    fs::path p(rel);
    if (p.is_absolute() || base_dir.empty()) return rel;
    return (fs::path(base_dir) / p).string();
}

void SceneManifest::validate() const {
    if (frames.empty()) throw ValidationError("manifest: no radar frames");
    for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i].timestamp_us <= frames[i - 1].timestamp_us)
            throw ValidationError("manifest: radar timestamps must be strictly increasing");
    if (block_az <= 0 || block_rng <= 0) throw ValidationError("manifest: bad block dims");
}

SceneManifest load_manifest(const std::string& path) {
    const json j = read_json_file(path);
    SceneManifest m;
    m.base_dir = fs::path(path).parent_path().string();
    try {
        for (const auto& f : j.at("frames"))
            m.frames.push_back({f.at("path").get<std::string>(), f.at("timestamp_us").get<std::int64_t>()});
        m.detections_path = j.at("detections").get<std::string>();
        for (const auto& c : j.at("cameras")) {
            CameraModel cam;
            cam.id = camera_from_name(c.at("id").get<std::string>());
            cam.hfov_deg = c.at("hfov_deg").get<double>();
            cam.boresight_deg = c.at("boresight_deg").get<double>();
            cam.image_width_px = c.at("image_width_px").get<int>();
            cam.image_height_px = c.at("image_height_px").get<int>();
            m.cameras.push_back(cam);
        }
        if (j.contains("block")) {
            m.block_az = j.at("block").at("az").get<int>();
            m.block_rng = j.at("block").at("rng").get<int>();
        }
    } catch (const json::exception& e) {
        throw IoError("bad manifest " + path + ": " + e.what());
    }
    m.validate();
    return m;
}

void save_manifest(const SceneManifest& manifest, const std::string& path) {
    manifest.validate();
    json j;
    auto frames = json::array();
    for (const auto& f : manifest.frames)
        frames.push_back({{"path", f.path}, {"timestamp_us", f.timestamp_us}});
    j["frames"] = std::move(frames);
    j["detections"] = manifest.detections_path;
    auto cams = json::array();
    for (const auto& c : manifest.cameras)
        cams.push_back({{"id", camera_name(c.id)},
                        {"hfov_deg", c.hfov_deg},
                        {"boresight_deg", c.boresight_deg},
                        {"image_width_px", c.image_width_px},
                        {"image_height_px", c.image_height_px}});
    j["cameras"] = std::move(cams);
    j["block"] = {{"az", manifest.block_az}, {"rng", manifest.block_rng}};
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace radarcs
