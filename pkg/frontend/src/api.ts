// Thin typed client over the service endpoints. Every call goes through one
// `request` function so tests can install a recording fetch and audit that
// each number on screen came from a response field.

import type {
  CasesResponse,
  ExplainResponse,
  LabelsResponse,
  PredictResponse,
  ServiceError,
  SessionResponse,
  SubmitLabelResponse,
  WhatIfResponse,
} from './types';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  status: number;
  body: ServiceError;

  constructor(status: number, body: ServiceError) {
    super(body.message ?? body.error ?? `HTTP ${status}`);
    this.status = status;
    this.body = body;
  }
}

export interface NetworkLogEntry {
  method: string;
  path: string;
  status: number;
  response: unknown;
}

export class ApiClient {
  private base: string;
  private token: string | null = null;
  private fetchFn: FetchLike;
  readonly networkLog: NetworkLogEntry[] = [];

  constructor(base: string, fetchFn?: FetchLike) {
    this.base = base.replace(/\/$/, '');
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const response = await this.fetchFn(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as T & ServiceError;
    this.networkLog.push({ method, path, status: response.status, response: payload });
    if (!response.ok) throw new ApiError(response.status, payload);
    return payload;
  }

  cases(): Promise<CasesResponse> {
    return this.request('GET', '/cases');
  }

  predict(values: Record<string, number>, threshold?: number): Promise<PredictResponse> {
    return this.request('POST', '/predict', { values, threshold });
  }

  whatIf(
    values: Record<string, number>,
    overrides: Record<string, number>,
    threshold?: number,
  ): Promise<WhatIfResponse> {
    return this.request('POST', '/whatif', { values, overrides, threshold });
  }

  explain(values: Record<string, number>, seed = 0): Promise<ExplainResponse> {
    return this.request('POST', '/explain', { values, seed });
  }

  labels(caseId?: string): Promise<LabelsResponse> {
    const query = caseId ? `?case_id=${encodeURIComponent(caseId)}` : '';
    return this.request('GET', `/labels${query}`);
  }

  submitLabel(caseId: string, call: 0 | 1, confidence: number): Promise<SubmitLabelResponse> {
    return this.request('POST', '/labels', { case_id: caseId, call, confidence });
  }

  session(rater: string): Promise<SessionResponse> {
    return this.request('GET', `/sessions/${encodeURIComponent(rater)}`);
  }

  saveSession(rater: string, cursor: number): Promise<SessionResponse> {
    return this.request('PUT', `/sessions/${encodeURIComponent(rater)}`, { cursor });
  }
}
