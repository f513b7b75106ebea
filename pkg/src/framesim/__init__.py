"""Frame-semantic similarity between annotations by spread activation over a frame graph."""

from .activation import (ActivationMap, RelatednessTable, SpreadParams, build_relatedness_table, dump_table,
                         load_table, pre_adjust, spread)
from .corpus import (AnnotationRecord, Corpus, DescriptiveStats, SimilaritySample, annotation_frames,
                     descriptive_stats, dump_corpus, histogram, load_corpus, pairwise_similarities)
from .daisy import CandidateSet, FrameAssignment, LemmaToken, candidates, disambiguate, lemmatize, parse
from .graph import (Frame, FrameElement, FrameGraph, FrameRelation, LexicalUnit, load_frame_database, lookup_lemma,
                    related, validate)
from .similarity import (AnnotationFrames, AssociativeArray, UndefinedSimilarityError, align, build_array,
                         compare_annotations, cosine)
from .stats import SummaryStats, TTestResult, student_t_cdf, summarize, t_test, t_test_raw

__version__ = "0.1.0"
