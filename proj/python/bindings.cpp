#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "radarcs/allocator.hpp"
#include "radarcs/dct.hpp"
#include "radarcs/errors.hpp"
#include "radarcs/frame.hpp"
#include "radarcs/frame_io.hpp"
#include "radarcs/guidance.hpp"
#include "radarcs/pipeline.hpp"
#include "radarcs/sensing.hpp"
#include "radarcs/solver.hpp"
#include "radarcs/synth.hpp"

namespace py = pybind11;
using namespace radarcs;

namespace {

PolarFrame frame_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> data,
                            double range_resolution_m, std::int64_t timestamp_us) {
    if (data.ndim() != 2) throw DimensionError("frame data must be 2-D (azimuth x range)");
    PolarFrame f = PolarFrame::zeros(static_cast<int>(data.shape(0)),
                                     static_cast<int>(data.shape(1)), range_resolution_m,
                                     timestamp_us);
    std::copy(data.data(), data.data() + data.size(), f.data.begin());
    f.validate();
    return f;
}

py::array_t<double> frame_to_array(const PolarFrame& f) {
    py::array_t<double> out({f.azimuth_bins, f.range_bins});
    std::copy(f.data.begin(), f.data.end(), out.mutable_data());
    return out;
}

std::vector<double> as_vector(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

py::array_t<double> as_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive block-based compressed sensing for FMCW scanning radar";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    py::class_<BlockGrid>(m, "BlockGrid")
        .def(py::init<int, int, int, int>(), py::arg("az_blocks"), py::arg("rng_blocks"),
             py::arg("block_az"), py::arg("block_rng"))
        .def_readonly("az_blocks", &BlockGrid::az_blocks)
        .def_readonly("rng_blocks", &BlockGrid::rng_blocks)
        .def_readonly("block_az", &BlockGrid::block_az)
        .def_readonly("block_rng", &BlockGrid::block_rng)
        .def("block_size", &BlockGrid::block_size)
        .def("frame_size", &BlockGrid::frame_size);

    py::class_<BlockRef>(m, "BlockRef")
        .def(py::init<int, int>(), py::arg("az_idx"), py::arg("rng_idx"))
        .def_readonly("az_idx", &BlockRef::az_idx)
        .def_readonly("rng_idx", &BlockRef::rng_idx)
        .def("__repr__", [](const BlockRef& r) {
            return "BlockRef(" + std::to_string(r.az_idx) + ", " + std::to_string(r.rng_idx) + ")";
        });

    py::class_<PolarFrame>(m, "PolarFrame")
        .def(py::init(&frame_from_array), py::arg("data"), py::arg("range_resolution_m") = 0.0438,
             py::arg("timestamp_us") = 0)
        .def_readonly("azimuth_bins", &PolarFrame::azimuth_bins)
        .def_readonly("range_bins", &PolarFrame::range_bins)
        .def_readonly("range_resolution_m", &PolarFrame::range_resolution_m)
        .def_readonly("azimuth_resolution_deg", &PolarFrame::azimuth_resolution_deg)
        .def_readonly("timestamp_us", &PolarFrame::timestamp_us)
        .def("to_numpy", &frame_to_array);

    m.def("partition", &partition, py::arg("azimuth_bins"), py::arg("range_bins"),
          py::arg("block_az"), py::arg("block_rng"));
    m.def("block_of", &block_of, py::arg("grid"), py::arg("azimuth_bin"), py::arg("range_bin"));
    m.def(
        "extract_block",
        [](const PolarFrame& f, const BlockGrid& g, const BlockRef& r) {
            return as_array(extract_block(f, g, r));
        },
        py::arg("frame"), py::arg("grid"), py::arg("ref"));
    m.def("range_block_span_m", &range_block_span_m, py::arg("grid"),
          py::arg("range_resolution_m"), py::arg("n_blocks"));

    py::class_<DctOperator>(m, "DctOperator")
        .def(py::init<int, int>(), py::arg("rows"), py::arg("cols"))
        .def_property_readonly("rows", &DctOperator::rows)
        .def_property_readonly("cols", &DctOperator::cols)
        .def("forward",
             [](const DctOperator& op, py::array_t<double, py::array::c_style> x) {
                 return as_array(op.forward(as_vector(x)));
             })
        .def("inverse", [](const DctOperator& op, py::array_t<double, py::array::c_style> x) {
            return as_array(op.inverse(as_vector(x)));
        });

    py::class_<MeasurementMatrix>(m, "MeasurementMatrix")
        .def_readonly("m", &MeasurementMatrix::m)
        .def_readonly("n", &MeasurementMatrix::n)
        .def_readonly("d", &MeasurementMatrix::d)
        .def_readonly("seed", &MeasurementMatrix::seed)
        .def_property_readonly("rows", [](const MeasurementMatrix& mat) {
            py::array_t<std::uint32_t> out(static_cast<py::ssize_t>(mat.rows.size()));
            std::copy(mat.rows.begin(), mat.rows.end(), out.mutable_data());
            return out;
        });

    m.def("gen_measurement_matrix", &gen_measurement_matrix, py::arg("m"), py::arg("n"),
          py::arg("d"), py::arg("seed"));
    m.def(
        "apply_matrix",
        [](const MeasurementMatrix& mat, py::array_t<double, py::array::c_style> x) {
            return as_array(apply_matrix(mat, as_vector(x)));
        },
        py::arg("matrix"), py::arg("x"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("feasibility_tol", &SolverConfig::feasibility_tol)
        .def_readwrite("max_iterations", &SolverConfig::max_iterations)
        .def_readwrite("convergence_tol", &SolverConfig::convergence_tol);

    py::class_<Recovery>(m, "Recovery")
        .def_property_readonly("coefficients",
                               [](const Recovery& r) { return as_array(r.coefficients); })
        .def_readonly("residual", &Recovery::residual)
        .def_readonly("iterations_used", &Recovery::iterations_used)
        .def_readonly("converged", &Recovery::converged);

    m.def(
        "basis_pursuit",
        [](const MeasurementMatrix& mat, const DctOperator& dct,
           py::array_t<double, py::array::c_style> y, const SolverConfig& cfg) {
            return basis_pursuit(mat, dct, as_vector(y), cfg);
        },
        py::arg("matrix"), py::arg("dct"), py::arg("y"), py::arg("config") = SolverConfig{});
    m.def(
        "omp",
        [](const MeasurementMatrix& mat, const DctOperator& dct,
           py::array_t<double, py::array::c_style> y, int k, double residual_tol) {
            return omp(mat, dct, as_vector(y), k, residual_tol);
        },
        py::arg("matrix"), py::arg("dct"), py::arg("y"), py::arg("sparsity_k"),
        py::arg("residual_tol") = 0.0);
    m.def(
        "reconstruct_block",
        [](const MeasurementMatrix& mat, const DctOperator& dct,
           py::array_t<double, py::array::c_style> y, const SolverConfig& cfg) {
            return as_array(reconstruct_block(mat, dct, as_vector(y), cfg));
        },
        py::arg("matrix"), py::arg("dct"), py::arg("y"), py::arg("config") = SolverConfig{});

    py::class_<CameraModel>(m, "CameraModel")
        .def_static("front_default", &CameraModel::front_default)
        .def_static("rear_default", &CameraModel::rear_default)
        .def_readwrite("hfov_deg", &CameraModel::hfov_deg)
        .def_readwrite("boresight_deg", &CameraModel::boresight_deg)
        .def_readwrite("image_width_px", &CameraModel::image_width_px)
        .def_readwrite("image_height_px", &CameraModel::image_height_px);

    py::class_<BoundingBox>(m, "BoundingBox")
        .def(py::init([](double x1, double y1, double x2, double y2, const std::string& cls,
                         double score) {
                 return BoundingBox{x1, y1, x2, y2, cls, score};
             }),
             py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"),
             py::arg("class_label") = "car", py::arg("score") = 1.0);

    m.def("bbox_to_azimuth", &bbox_to_azimuth, py::arg("camera"), py::arg("box"));

    py::class_<CfarParams>(m, "CfarParams")
        .def(py::init<>())
        .def_readwrite("train_cells", &CfarParams::train_cells)
        .def_readwrite("guard_cells", &CfarParams::guard_cells)
        .def_readwrite("pfa", &CfarParams::pfa)
        .def_readwrite("min_hits_per_block", &CfarParams::min_hits_per_block);

    py::class_<CfarMap>(m, "CfarMap")
        .def_property_readonly("mask",
                               [](const CfarMap& map) {
                                   py::array_t<std::uint8_t> out(
                                       {map.azimuth_bins, map.range_bins});
                                   std::copy(map.mask.begin(), map.mask.end(), out.mutable_data());
                                   return out;
                               })
        .def("total_hits", &CfarMap::total_hits)
        .def("hit_counts", &CfarMap::hit_counts, py::arg("grid"));

    m.def("cfar_detect", &cfar_detect, py::arg("frame"), py::arg("params") = CfarParams{});

    py::enum_<Region>(m, "Region").value("R1", Region::R1).value("R2", Region::R2).value(
        "R3", Region::R3);

    py::class_<RateTable>(m, "RateTable")
        .def(py::init<>())
        .def_static("algo1_default", &RateTable::algo1_default)
        .def_static("algo2_default", &RateTable::algo2_default)
        .def_static("algo1_for_grid", &RateTable::algo1_for_grid)
        .def_static("algo2_for_grid", &RateTable::algo2_for_grid)
        .def_readwrite("r1_range_blocks", &RateTable::r1_range_blocks)
        .def_readwrite("near_range_blocks", &RateTable::near_range_blocks)
        .def_readwrite("exact_budget", &RateTable::exact_budget);

    py::class_<SamplingPlan>(m, "SamplingPlan")
        .def_readonly("grid", &SamplingPlan::grid)
        .def_readonly("total_budget_fraction", &SamplingPlan::total_budget_fraction)
        .def_readonly("rates", &SamplingPlan::rates)
        .def_readonly("counts", &SamplingPlan::counts)
        .def("rate", &SamplingPlan::rate, py::arg("ref"))
        .def("count", &SamplingPlan::count, py::arg("ref"))
        .def("region", &SamplingPlan::region, py::arg("ref"))
        .def("is_boosted", &SamplingPlan::is_boosted, py::arg("ref"))
        .def("to_json", [](const SamplingPlan& p) { return plan_to_json(p); });

    m.def("plan_total", &plan_total);
    m.def("uniform_plan", &uniform_plan, py::arg("grid"), py::arg("rate"));
    m.def("top_up_azimuths", &top_up_azimuths, py::arg("chosen"), py::arg("az_blocks"),
          py::arg("minimum"), py::arg("seed"));
    m.def("allocate_algo1", &allocate_algo1, py::arg("chosen_azimuths"), py::arg("grid"),
          py::arg("table"), py::arg("budget_fraction") = 0.10);
    m.def(
        "allocate_algo2",
        [](const std::set<int>& chosen, const std::vector<std::pair<std::pair<int, int>, int>>& flagged,
           const BlockGrid& grid, const RateTable& table, double budget) {
            std::vector<FlaggedBlock> fl;
            for (const auto& [ref, hits] : flagged)
                fl.push_back({BlockRef{ref.first, ref.second}, hits});
            return allocate_algo2(chosen, fl, grid, table, budget);
        },
        py::arg("chosen_azimuths"), py::arg("flagged"), py::arg("grid"), py::arg("table"),
        py::arg("budget_fraction") = 0.10);

    m.def(
        "psnr",
        [](const PolarFrame& ref, const PolarFrame& rec, std::optional<double> peak) {
            return psnr(ref, rec, peak);
        },
        py::arg("reference"), py::arg("reconstruction"), py::arg("peak") = std::nullopt);

    m.def("load_frame", &load_frame, py::arg("png_path"));
    m.def("save_frame", &save_frame, py::arg("frame"), py::arg("png_path"));
    m.def("load_manifest", &load_manifest, py::arg("path"));

    py::class_<SynthTarget>(m, "SynthTarget")
        .def(py::init<>())
        .def_readwrite("azimuth_deg", &SynthTarget::azimuth_deg)
        .def_readwrite("range_m", &SynthTarget::range_m)
        .def_readwrite("amplitude", &SynthTarget::amplitude)
        .def_readwrite("extent_bins", &SynthTarget::extent_bins)
        .def_readwrite("d_range_m_per_frame", &SynthTarget::d_range_m_per_frame)
        .def_readwrite("d_azimuth_deg_per_frame", &SynthTarget::d_azimuth_deg_per_frame)
        .def_readwrite("class_label", &SynthTarget::class_label);

    py::class_<SynthSceneConfig>(m, "SynthSceneConfig")
        .def(py::init<>())
        .def_readwrite("az_blocks", &SynthSceneConfig::az_blocks)
        .def_readwrite("rng_blocks", &SynthSceneConfig::rng_blocks)
        .def_readwrite("block_az", &SynthSceneConfig::block_az)
        .def_readwrite("block_rng", &SynthSceneConfig::block_rng)
        .def_readwrite("noise_floor", &SynthSceneConfig::noise_floor)
        .def_readwrite("n_frames", &SynthSceneConfig::n_frames)
        .def_readwrite("seed", &SynthSceneConfig::seed)
        .def_readwrite("targets", &SynthSceneConfig::targets);

    m.def(
        "synth_scene",
        [](const SynthSceneConfig& cfg, const std::string& out_dir) {
            synth_scene(cfg, out_dir);
        },
        py::arg("config"), py::arg("out_dir"));

    py::enum_<Mode>(m, "Mode")
        .value("baseline", Mode::baseline)
        .value("algo1", Mode::algo1)
        .value("algo2", Mode::algo2);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("budget_fraction", &RunConfig::budget_fraction)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("out_dir", &RunConfig::out_dir)
        .def_readwrite("threads", &RunConfig::threads)
        .def_readwrite("noise_sigma", &RunConfig::noise_sigma)
        .def_readwrite("exact_budget", &RunConfig::exact_budget);

    py::class_<FrameReport>(m, "FrameReport")
        .def_readonly("frame_index", &FrameReport::frame_index)
        .def_readonly("psnr_full_db", &FrameReport::psnr_full_db)
        .def_readonly("total_measurements", &FrameReport::total_measurements)
        .def_readonly("chosen_azimuths", &FrameReport::chosen_azimuths)
        .def_readonly("boosted_blocks", &FrameReport::boosted_blocks)
        .def("to_json", [](const FrameReport& r) { return report_to_json(r); });

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("reports", &RunResult::reports)
        .def_readonly("any_hard_failure", &RunResult::any_hard_failure)
        .def_property_readonly("reconstructions", [](const RunResult& r) {
            std::vector<py::array_t<double>> out;
            for (const auto& f : r.reconstructions) out.push_back(frame_to_array(f));
            return out;
        });

    m.def(
        "run_sequence",
        [](const std::string& manifest_path, Mode mode, const RunConfig& config) {
            return run_sequence(load_manifest(manifest_path), mode, config);
        },
        py::arg("manifest_path"), py::arg("mode"), py::arg("config") = RunConfig{});
}
