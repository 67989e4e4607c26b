#pragma once

#include "ltsa/ground_truth.hpp"
#include "ltsa/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ltsa {

/// CSV parse failure with a 1-based location.
class CsvError : public IoError {
public:
    enum class Kind { Empty, Ragged, NonNumeric };
    CsvError(Kind k, const std::string& what, long r = 0, long c = 0)
        : IoError(what), kind(k), row(r), col(c) {}
    Kind kind;
    long row;
    long col;
};

enum class CsvOrientation { RowsArePoints, ColumnsArePoints };

struct CsvOptions {
    CsvOrientation orientation = CsvOrientation::RowsArePoints;
    bool header = false;  // read: skip one header row; write: emit c0,c1,...
};

/// Comma-separated, '.'-decimal table. LF or CRLF accepted on read, LF
/// written, 17 significant digits (full double round trip).
Matrix load_csv_matrix(const std::string& path, bool header = false);
void save_csv_matrix(const std::string& path, const Matrix& m, bool header = false);

DataMatrix load_csv(const std::string& path, const CsvOptions& opts = {});
void save_csv(const std::string& path, const DataMatrix& data, const CsvOptions& opts = {});

/// Key=value sidecar files.
std::map<std::string, std::string> load_key_values(const std::string& path);
void save_key_values(const std::string& path,
                     const std::map<std::string, std::string>& kv);

/// A dataset as stored on disk: `<stem>.csv` holds the points, and when
/// present `<stem>.truth.csv` holds tau* (row r = coordinate r of tau*),
/// `<stem>.meta.txt` holds generator metadata and labels, and
/// `<stem>.transform.csv` the high-dimensional embedding matrix.
struct DatasetBundle {
    DataMatrix data;
    std::optional<GroundTruth> truth;
    std::vector<int> labels;
    std::map<std::string, std::string> meta;
};

void save_dataset(const std::string& stem, const DataMatrix& data,
                  const GroundTruth* truth = nullptr,
                  const std::vector<int>* labels = nullptr,
                  const std::map<std::string, std::string>& extra_meta = {},
                  const Matrix* transform = nullptr);

/// Accepts either the stem or the `<stem>.csv` path. Evaluators are rebound
/// from the generator name in the sidecar when possible, and the noise record
/// is recovered as data - f(tau*).
DatasetBundle load_dataset(const std::string& stem_or_csv);

}  // namespace ltsa
