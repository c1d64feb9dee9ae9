#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <csetjmp>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>

#include <json.hpp>

#include "destripe/errors.hpp"
#include "destripe/image.hpp"

namespace destripe {

    enum class ImageFormat { png8, png16, pgm, raw_f32 };

    struct ImageFile {
        std::filesystem::path path;
        ImageFormat format = ImageFormat::raw_f32;
    };

    /// How integer formats map reals to codes: clamp [0,1], or stretch min..max to full scale.
    enum class IntegerScaling { clamp, rescale };

    /// .png -> png8, .pgm -> pgm, .f32/.raw -> raw_f32.
    [[nodiscard]] inline ImageFormat format_from_path(const std::filesystem::path& path) {
        std::string ext = path.extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png")
            return ImageFormat::png8;
        if (ext == ".pgm")
            return ImageFormat::pgm;
        if (ext == ".f32" || ext == ".raw")
            return ImageFormat::raw_f32;
        throw UnsupportedFormatError("cannot infer image format from extension of '" + path.string() + "'");
    }

    /// The JSON sidecar of a raw_f32 file lives next to it as "<path>.json".
    [[nodiscard]] inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
        return std::filesystem::path(path.string() + ".json");
    }

    namespace detail {

        struct FileCloser {
            void operator()(std::FILE* f) const noexcept {
                if (f != nullptr)
                    std::fclose(f);
            }
        };
        using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

        inline FilePtr open_file(const std::filesystem::path& path, const char* mode) {
            FilePtr f(std::fopen(path.c_str(), mode));
            if (!f)
                throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
            return f;
        }

        inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw IoError("cannot open '" + path.string() + "' for reading");
            return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        }

        inline void write_all(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw IoError("cannot open '" + path.string() + "' for writing");
            out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
            if (!out)
                throw IoError("failed writing '" + path.string() + "'");
        }

        // libpng reports errors through longjmp. The functions below only hold
        // trivially destructible locals between setjmp and any libpng call.
        struct PngInfo {
            std::uint32_t width = 0;
            std::uint32_t height = 0;
            int bit_depth = 0;
            int color_type = 0;
        };

        inline void png_error_to_buffer(png_structp png, png_const_charp msg) {
            auto* buffer = static_cast<char*>(png_get_error_ptr(png));
            std::snprintf(buffer, 256, "%s", msg);
            png_longjmp(png, 1);
        }

        inline void png_ignore_warning(png_structp, png_const_charp) {}

        // Reads the whole file into `pixels` as native-endian 8- or 16-bit gray.
        // Returns false and fills `error` on failure; `pixels` must be sized by
        // the caller after a successful header pass, so this runs twice.
        inline bool png_read_pass(std::FILE* fp, PngInfo* info, std::uint8_t* pixels, std::size_t row_bytes,
                                  char* error) {
            png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, error, png_error_to_buffer,
                                                     png_ignore_warning);
            if (png == nullptr) {
                std::snprintf(error, 256, "out of memory");
                return false;
            }
            png_infop pinfo = png_create_info_struct(png);
            if (pinfo == nullptr) {
                png_destroy_read_struct(&png, nullptr, nullptr);
                std::snprintf(error, 256, "out of memory");
                return false;
            }
            if (setjmp(png_jmpbuf(png))) {
                png_destroy_read_struct(&png, &pinfo, nullptr);
                return false;
            }
            png_init_io(png, fp);
            png_read_info(png, pinfo);
            info->width = png_get_image_width(png, pinfo);
            info->height = png_get_image_height(png, pinfo);
            info->bit_depth = png_get_bit_depth(png, pinfo);
            info->color_type = png_get_color_type(png, pinfo);

            if (pixels != nullptr) {
                if (info->bit_depth < 8)
                    png_set_expand_gray_1_2_4_to_8(png);
                if (info->bit_depth == 16 && std::endian::native == std::endian::little)
                    png_set_swap(png);
                png_set_interlace_handling(png);
                png_read_update_info(png, pinfo);
                for (std::uint32_t r = 0; r < info->height; ++r)
                    png_read_row(png, pixels + r * row_bytes, nullptr);
                png_read_end(png, nullptr);
            }
            png_destroy_read_struct(&png, &pinfo, nullptr);
            return true;
        }

        inline bool png_write_pass(std::FILE* fp, std::uint32_t width, std::uint32_t height, int bit_depth,
                                   const std::uint8_t* pixels, std::size_t row_bytes, char* error) {
            png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, error, png_error_to_buffer,
                                                      png_ignore_warning);
            if (png == nullptr) {
                std::snprintf(error, 256, "out of memory");
                return false;
            }
            png_infop pinfo = png_create_info_struct(png);
            if (pinfo == nullptr) {
                png_destroy_write_struct(&png, nullptr);
                std::snprintf(error, 256, "out of memory");
                return false;
            }
            if (setjmp(png_jmpbuf(png))) {
                png_destroy_write_struct(&png, &pinfo);
                return false;
            }
            png_init_io(png, fp);
            png_set_IHDR(png, pinfo, width, height, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                         PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
            png_write_info(png, pinfo);
            if (bit_depth == 16 && std::endian::native == std::endian::little)
                png_set_swap(png);
            for (std::uint32_t r = 0; r < height; ++r)
                png_write_row(png, pixels + r * row_bytes);
            png_write_end(png, nullptr);
            png_destroy_write_struct(&png, &pinfo);
            return true;
        }

        inline ImageGrid load_png(const std::filesystem::path& path) {
            char error[256] = {0};
            PngInfo info;
            {
                FilePtr fp = open_file(path, "rb");
                if (!png_read_pass(fp.get(), &info, nullptr, 0, error))
                    throw CorruptFileError("'" + path.string() + "': " + error);
            }
            if (info.color_type != PNG_COLOR_TYPE_GRAY)
                throw UnsupportedFormatError("'" + path.string() + "': only grayscale PNG is supported");

            const bool wide = info.bit_depth == 16;
            const std::size_t row_bytes = static_cast<std::size_t>(info.width) * (wide ? 2 : 1);
            std::vector<std::uint8_t> raw(row_bytes * info.height);
            {
                FilePtr fp = open_file(path, "rb");
                if (!png_read_pass(fp.get(), &info, raw.data(), row_bytes, error))
                    throw CorruptFileError("'" + path.string() + "': " + error);
            }

            ImageGrid img(info.width, info.height);
            auto px = img.pixels();
            if (wide) {
                for (std::size_t i = 0; i < px.size(); ++i) {
                    std::uint16_t code = 0;
                    std::memcpy(&code, raw.data() + 2 * i, 2);
                    px[i] = static_cast<double>(code) / 65535.0;
                }
            } else {
                // sub-byte depths were expanded to the full 8-bit range
                for (std::size_t i = 0; i < px.size(); ++i)
                    px[i] = static_cast<double>(raw[i]) / 255.0;
            }
            return img;
        }

        // Scaling of reals onto [0, max_code] with round-half-away-from-zero.
        inline std::vector<std::uint32_t> quantize(const ImageGrid& img, std::uint32_t max_code,
                                                   IntegerScaling scaling) {
            double lo = 0.0;
            double hi = 1.0;
            if (scaling == IntegerScaling::rescale) {
                const auto [mn, mx] = std::minmax_element(img.pixels().begin(), img.pixels().end());
                lo = *mn;
                hi = *mx > *mn ? *mx : *mn + 1.0;
            }
            std::vector<std::uint32_t> codes(img.size());
            const auto px = img.pixels();
            for (std::size_t i = 0; i < px.size(); ++i) {
                const double unit = std::clamp((px[i] - lo) / (hi - lo), 0.0, 1.0);
                codes[i] = static_cast<std::uint32_t>(std::round(unit * max_code));
            }
            return codes;
        }

        inline void save_png(const ImageGrid& img, const std::filesystem::path& path, int bit_depth,
                             IntegerScaling scaling) {
            const bool wide = bit_depth == 16;
            const auto codes = quantize(img, wide ? 65535u : 255u, scaling);
            const std::size_t row_bytes = img.width() * (wide ? 2 : 1);
            std::vector<std::uint8_t> raw(row_bytes * img.height());
            for (std::size_t i = 0; i < codes.size(); ++i) {
                if (wide) {
                    const auto code = static_cast<std::uint16_t>(codes[i]);
                    std::memcpy(raw.data() + 2 * i, &code, 2);
                } else {
                    raw[i] = static_cast<std::uint8_t>(codes[i]);
                }
            }
            char error[256] = {0};
            FilePtr fp = open_file(path, "wb");
            if (!png_write_pass(fp.get(), static_cast<std::uint32_t>(img.width()),
                                static_cast<std::uint32_t>(img.height()), bit_depth, raw.data(), row_bytes, error))
                throw IoError("'" + path.string() + "': " + error);
        }

        inline ImageGrid load_pgm(const std::filesystem::path& path) {
            const auto bytes = read_all(path);
            std::size_t pos = 0;
            auto fail = [&](const std::string& why) -> CorruptFileError {
                return CorruptFileError("'" + path.string() + "': " + why);
            };
            auto skip_space = [&] {
                while (pos < bytes.size()) {
                    if (bytes[pos] == '#') {
                        while (pos < bytes.size() && bytes[pos] != '\n')
                            ++pos;
                    } else if (std::isspace(bytes[pos])) {
                        ++pos;
                    } else {
                        break;
                    }
                }
            };
            auto read_uint = [&]() -> std::size_t {
                skip_space();
                if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
                    throw fail("malformed PGM header");
                std::size_t v = 0;
                while (pos < bytes.size() && std::isdigit(bytes[pos]))
                    v = v * 10 + (bytes[pos++] - '0');
                return v;
            };

            if (bytes.size() < 2 || bytes[0] != 'P')
                throw fail("not a PNM file");
            if (bytes[1] == '3' || bytes[1] == '6')
                throw UnsupportedFormatError("'" + path.string() + "': color PNM is not supported");
            if (bytes[1] != '2' && bytes[1] != '5')
                throw fail("unsupported PNM variant");
            const bool ascii = bytes[1] == '2';
            pos = 2;
            const std::size_t width = read_uint();
            const std::size_t height = read_uint();
            const std::size_t maxval = read_uint();
            if (width == 0 || height == 0 || maxval == 0 || maxval > 65535)
                throw fail("invalid PGM header values");

            ImageGrid img(width, height);
            auto px = img.pixels();
            const auto scale = static_cast<double>(maxval);
            if (ascii) {
                for (double& v : px)
                    v = static_cast<double>(read_uint()) / scale;
                return img;
            }
            ++pos; // single whitespace after maxval
            const std::size_t bytes_per = maxval > 255 ? 2 : 1;
            if (bytes.size() < pos + px.size() * bytes_per)
                throw fail("truncated PGM payload");
            for (std::size_t i = 0; i < px.size(); ++i) {
                const std::size_t at = pos + i * bytes_per;
                const unsigned code = bytes_per == 2 ? (bytes[at] << 8) | bytes[at + 1] : bytes[at];
                px[i] = static_cast<double>(code) / scale;
            }
            return img;
        }

        inline void save_pgm(const ImageGrid& img, const std::filesystem::path& path, IntegerScaling scaling) {
            const auto codes = quantize(img, 255u, scaling);
            const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                                       "\n255\n";
            std::vector<std::uint8_t> bytes(header.begin(), header.end());
            for (auto c : codes)
                bytes.push_back(static_cast<std::uint8_t>(c));
            write_all(path, bytes);
        }

        inline ImageGrid load_raw_f32(const std::filesystem::path& path) {
            const auto side = sidecar_path(path);
            std::ifstream meta_in(side);
            if (!meta_in)
                throw IoError("cannot open sidecar '" + side.string() + "'");
            nlohmann::json meta;
            try {
                meta_in >> meta;
            } catch (const nlohmann::json::exception& e) {
                throw CorruptFileError("'" + side.string() + "': " + e.what());
            }
            std::size_t width = 0;
            std::size_t height = 0;
            try {
                width = meta.at("width").get<std::size_t>();
                height = meta.at("height").get<std::size_t>();
                if (meta.at("dtype").get<std::string>() != "f32le")
                    throw UnsupportedFormatError("'" + side.string() + "': dtype must be f32le");
            } catch (const nlohmann::json::exception& e) {
                throw CorruptFileError("'" + side.string() + "': " + e.what());
            }
            if (width == 0 || height == 0)
                throw CorruptFileError("'" + side.string() + "': dimensions must be positive");

            const auto bytes = read_all(path);
            if (bytes.size() != width * height * 4)
                throw CorruptFileError("'" + path.string() + "': payload is " + std::to_string(bytes.size()) +
                                       " bytes, sidecar says " + std::to_string(width) + "x" +
                                       std::to_string(height) + " f32");
            ImageGrid img(width, height);
            auto px = img.pixels();
            for (std::size_t i = 0; i < px.size(); ++i) {
                std::uint32_t bits = static_cast<std::uint32_t>(bytes[4 * i]) |
                                     static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8 |
                                     static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16 |
                                     static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24;
                const auto value = std::bit_cast<float>(bits);
                if (!std::isfinite(value))
                    throw CorruptFileError("'" + path.string() + "': non-finite sample at index " +
                                           std::to_string(i));
                px[i] = value;
            }
            return img;
        }

        inline void save_raw_f32(const ImageGrid& img, const std::filesystem::path& path) {
            std::vector<std::uint8_t> bytes(img.size() * 4);
            const auto px = img.pixels();
            for (std::size_t i = 0; i < px.size(); ++i) {
                const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(px[i]));
                bytes[4 * i] = static_cast<std::uint8_t>(bits);
                bytes[4 * i + 1] = static_cast<std::uint8_t>(bits >> 8);
                bytes[4 * i + 2] = static_cast<std::uint8_t>(bits >> 16);
                bytes[4 * i + 3] = static_cast<std::uint8_t>(bits >> 24);
            }
            write_all(path, bytes);

            const nlohmann::json meta = {{"width", img.width()}, {"height", img.height()}, {"dtype", "f32le"}};
            const std::string text = meta.dump() + "\n";
            write_all(sidecar_path(path), std::vector<std::uint8_t>(text.begin(), text.end()));
        }

    } // namespace detail

    /// 8-bit codes load as value/255, 16-bit as value/65535, raw_f32 verbatim.
    /// PNG files are read at whatever depth they carry; `file.format` only
    /// distinguishes PNG from the other containers.
    [[nodiscard]] inline ImageGrid load(const ImageFile& file) {
        if (!std::filesystem::exists(file.path))
            throw IoError("no such file: '" + file.path.string() + "'");
        switch (file.format) {
        case ImageFormat::png8:
        case ImageFormat::png16: return detail::load_png(file.path);
        case ImageFormat::pgm: return detail::load_pgm(file.path);
        case ImageFormat::raw_f32: return detail::load_raw_f32(file.path);
        }
        throw UnsupportedFormatError("unknown image format");
    }

    [[nodiscard]] inline ImageGrid load(const std::filesystem::path& path) {
        return load(ImageFile{path, format_from_path(path)});
    }

    /// Integer formats round half away from zero after scaling; raw_f32 stores floats.
    inline void save(const ImageGrid& img, const ImageFile& file, IntegerScaling scaling = IntegerScaling::clamp) {
        switch (file.format) {
        case ImageFormat::png8: detail::save_png(img, file.path, 8, scaling); return;
        case ImageFormat::png16: detail::save_png(img, file.path, 16, scaling); return;
        case ImageFormat::pgm: detail::save_pgm(img, file.path, scaling); return;
        case ImageFormat::raw_f32: detail::save_raw_f32(img, file.path); return;
        }
        throw UnsupportedFormatError("unknown image format");
    }

    inline void save(const ImageGrid& img, const std::filesystem::path& path,
                     IntegerScaling scaling = IntegerScaling::clamp) {
        save(img, ImageFile{path, format_from_path(path)}, scaling);
    }

} // namespace destripe
