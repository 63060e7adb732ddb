/**
 * Typed client for the review service. Every payload crossing the wire is
 * validated with zod in both directions, so a contract drift fails loudly
 * here instead of as a half-rendered board.
 */

import { z } from "zod";

export const CaseViewSchema = z.object({
  case_id: z.string().min(1),
  narrative: z.string(),
  entities: z.array(
    z.object({ token: z.string().min(1), pseudonym: z.string().min(1) }),
  ),
  facts: z.array(
    z.object({
      subject_token: z.string().min(1),
      predicate: z.string().min(1),
      object_token: z.string().min(1),
      kind: z.enum(["explicit", "human_proposed"]),
    }),
  ),
  hints: z.array(
    z.object({
      kind: z.enum(["suspect_edge", "missing_edge"]),
      a_token: z.string().min(1),
      b_token: z.string().min(1),
    }),
  ),
  predicates: z.array(z.string().min(1)),
});
export type CaseView = z.infer<typeof CaseViewSchema>;
export type CaseFact = CaseView["facts"][number];

export const FeedbackBodySchema = z.object({
  event_id: z.string().min(1),
  case_id: z.string().min(1),
  player_id: z.string().min(1),
  action: z.enum(["confirm", "reject", "propose"]),
  subject_token: z.string().min(1),
  predicate: z.string().min(1),
  object_token: z.string().min(1),
});
export type FeedbackBody = z.infer<typeof FeedbackBodySchema>;

export const FeedbackAckSchema = z.object({
  event_id: z.string(),
  duplicate: z.boolean(),
  edge_weight: z.number(),
  status: z.string(),
});
export type FeedbackAck = z.infer<typeof FeedbackAckSchema>;

export const QaAnswerSchema = z.object({
  status: z.enum(["answered", "not_found"]),
  answer: z.string(),
  fact_path: z.array(
    z.object({
      subject: z.string(),
      predicate: z.string(),
      object: z.string(),
    }).passthrough(),
  ),
  score: z.number(),
});
export type QaAnswer = z.infer<typeof QaAnswerSchema>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }

  get caseGone(): boolean {
    return this.status === 404;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = (JSON.parse(text) as { detail?: string }).detail ?? text;
      } catch {
        // non-JSON error body; keep raw text
      }
      throw new ApiError(response.status, detail);
    }
    return JSON.parse(text);
  }

  async nextCase(): Promise<CaseView> {
    return CaseViewSchema.parse(await this.request("/case/next"));
  }

  /** Validates the outbound body before it ever leaves the client. */
  async sendFeedback(body: FeedbackBody): Promise<FeedbackAck> {
    const parsed = FeedbackBodySchema.parse(body);
    const raw = await this.request("/feedback", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(parsed),
    });
    return FeedbackAckSchema.parse(raw);
  }

  async ask(question: string): Promise<QaAnswer> {
    const raw = await this.request("/qa", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ question }),
    });
    return QaAnswerSchema.parse(raw);
  }
}
