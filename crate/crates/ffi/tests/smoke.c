#include <math.h>
#include <stdio.h>
#include <string.h>

#include "citescope.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond);   \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    CHECK(strlen(cs_version()) > 0);

    CsLexicon *lex = NULL;
    CHECK(cs_lexicon_default(&lex) == CS_STATUS_OK);
    CsSentiment s;
    CHECK(cs_sentiment_score(lex, "A weak and flawed design.", &s) == CS_STATUS_OK);
    CHECK(s.compound < 0.0);
    cs_lexicon_free(lex);

    CsDocument *doc = NULL;
    CHECK(cs_document_parse_json("{\"id\":\"d\",\"year\":2010,\"title\":\"\",\"abstract\":\"\","
                                 "\"sections\":[{\"label\":\"b\",\"text\":\"As shown [1].\"}],"
                                 "\"references\":[{\"key\":\"1\",\"raw\":\"\"}]}",
                                 &doc) == CS_STATUS_OK);
    CsDocumentCounts counts;
    CHECK(cs_document_counts(doc, &counts) == CS_STATUS_OK);
    CHECK(counts.body_chars == 13 && counts.mentions == 1 && counts.citations == 1);
    double p = 0.0;
    CHECK(cs_document_mention_progression(doc, 0, &p) == CS_STATUS_OK);
    CHECK(p == 9.0 / 13.0);
    cs_document_free(doc);

    const char *a[] = {"x", "y", "z", "w"};
    const char *b[] = {"z", "w", "1", "2", "3", "4", "5", "6", "7"};
    double o = 0.0;
    CHECK(cs_ochiai(a, 4, b, 9, &o) == CS_STATUS_OK);
    CHECK(fabs(o - 1.0 / 3.0) < 1e-15);

    CsTextPart part;
    CHECK(cs_tertile(2.0, &part) == CS_STATUS_INVALID_ARGUMENT);
    CHECK(strstr(cs_last_error_message(), "outside") != NULL);

    CsAnalyzeOptions options = cs_analyze_options_default();
    CHECK(options.min_pairs == 1 && options.exclude_target_from_coupling);
    puts("ok");
    return 0;
}
